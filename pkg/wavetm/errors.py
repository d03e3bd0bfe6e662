"""Exceptions and warnings raised by wavetm computations."""

from typing import Optional


class WaveTMError(Exception):
  """Base class for all computation errors."""


class InputError(WaveTMError):
  """Invalid user input, reported with the offending field path."""

  def __init__(self, message: str, field_path: Optional[str] = None):
    """Initialize with an optional dotted field path (e.g. `params.L`)."""
    self.field_path = field_path
    prefix = f'{field_path}: ' if field_path else ''
    super().__init__(f'{prefix}{message}')


class DistributionalPotential(WaveTMError):
  """Pointwise evaluation requested for a delta-type potential."""


class InvalidWavenumber(WaveTMError):
  """Wavenumber is not strictly positive (or missing where the coupling needs it)."""


class UnsupportedFamily(WaveTMError):
  """Operation has no implementation for this potential family."""


class QuadratureFailure(WaveTMError):
  """Quadrature did not reach its tolerance."""

  def __init__(self, message: str, residual: float):
    self.residual = residual
    super().__init__(f'{message} (residual estimate {residual:.3e})')


class IntegrationFailure(WaveTMError):
  """The ODE integrator failed (step-size underflow or similar)."""


class SpectralSingularity(WaveTMError):
  """M22 vanishes within tolerance, so T diverges."""


class WavenumberMismatch(WaveTMError):
  """Transfer matrices at different wavenumbers cannot be composed."""


class DegenerateDenominator(WaveTMError):
  """A perturbative amplitude formula has a vanishing denominator."""


class NotPeriodic(WaveTMError):
  """The potential is not a locally periodic (Fourier coefficient) family."""


class PeriodMismatch(WaveTMError):
  """The support length is not compatible with the period."""


class NonSmoothData(WaveTMError):
  """Derivative noise of a reconstructed potential exceeds its bound."""


class DegenerateAlphaDenominator(WaveTMError):
  """alpha cannot be determined from reflection data."""


class TailNonconvergence(WaveTMError):
  """Tail averages of an inverse transform did not settle."""


class TruncationWarning(UserWarning):
  """Infinite-range tail or truncated spectrum above its threshold."""


class NonconvergentSeries(UserWarning):
  """Born series terms are not decreasing."""
