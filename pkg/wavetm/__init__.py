"""Transfer matrices of complex 1D potentials via a two-level non-Hermitian evolution."""

__version__ = '0.1.0'
