"""Two-level (two-component) form of the time-independent Schroedinger equation.

With tau = kx and w(tau) = v(tau/k)/(2k^2), the pair
Psi = ((phi - i phi')/2, (phi + i phi')/2) obeys i dPsi/dtau = H(tau) Psi with
H = -sigma_3 + w N, N = [[1, 1], [-1, -1]]. Removing the free evolution gives
the interaction-picture generator w [[1, e^{-2i tau}], [-e^{2i tau}, -1]].
"""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from wavetm.config import get_settings
from wavetm.potential_model import PotentialSpec, evaluate, principal_sqrt

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
N_MATRIX = np.array([[1, 1], [-1, -1]], dtype=complex)


class Picture(str, Enum):
  """Frame in which the two-level Hamiltonian is written."""

  SCHROEDINGER = 'schroedinger'
  INTERACTION = 'interaction'


def schroedinger_matrix(w: complex) -> np.ndarray:
  """-sigma_3 + w N."""
  return -SIGMA_3 + w * N_MATRIX


def interaction_matrix(w, tau):
  """w [[1, e^{-2i tau}], [-e^{2i tau}, -1]], broadcast over w and tau.

  Returns an array of shape (..., 2, 2).
  """
  w = np.asarray(w, dtype=complex)
  tau = np.asarray(tau, dtype=float)
  w, tau = np.broadcast_arrays(w, tau)
  phase = np.exp(-2j * tau)
  out = np.empty(w.shape + (2, 2), dtype=complex)
  out[..., 0, 0] = w
  out[..., 0, 1] = w * phase
  out[..., 1, 0] = -w / phase
  out[..., 1, 1] = -w
  return out


class TwoLevelHamiltonian(BaseModel):
  """H(tau) or its interaction-picture counterpart at one instant."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  matrix: np.ndarray
  tau: float
  w: complex
  picture: Picture

  @property
  def trace(self) -> complex:
    """Trace of the matrix."""
    return complex(np.trace(self.matrix))

  @property
  def determinant(self) -> complex:
    """Determinant of the matrix."""
    return complex(np.linalg.det(self.matrix))


class SpectralDiagnostic(BaseModel):
  """Eigenvalues, exceptional-point flag and pseudo-Hermiticity of H(tau)."""

  model_config = ConfigDict(frozen=True)

  tau: float
  e_plus: complex
  e_minus: complex
  n_of_tau: complex
  exceptional: bool
  pseudo_hermitian_residual: float
  eigenvector_condition: float


class StateVector(BaseModel):
  """Two-component state built from phi and its tau-derivative."""

  model_config = ConfigDict(frozen=True)

  psi1: complex
  psi2: complex

  @classmethod
  def from_wave(cls, phi: complex, phi_dot: complex) -> 'StateVector':
    """Build Psi from phi(tau) and dphi/dtau."""
    return cls(psi1=(phi - 1j * phi_dot) / 2, psi2=(phi + 1j * phi_dot) / 2)

  @property
  def components(self) -> np.ndarray:
    """(Psi_1, Psi_2) as a complex array."""
    return np.array([self.psi1, self.psi2], dtype=complex)

  @property
  def phi(self) -> complex:
    """Psi_1 + Psi_2."""
    return self.psi1 + self.psi2

  @property
  def phi_dot(self) -> complex:
    """d phi / d tau from i phi_dot = Psi_2 - Psi_1."""
    # i phi_dot = psi2 - psi1
    return -1j * (self.psi2 - self.psi1)


def w_at(spec: PotentialSpec, k: float, tau: float) -> complex:
  """w(tau) = v(tau/k)/(2k^2)."""
  return evaluate(spec, tau / k, k) / (2 * k * k)


def hamiltonian_at(
  spec: PotentialSpec, k: float, tau: float, picture: Picture = Picture.SCHROEDINGER
) -> TwoLevelHamiltonian:
  """Two-level Hamiltonian of spec at wavenumber k and time tau.

  Raises:
      DistributionalPotential: for delta families
      InvalidWavenumber: for k <= 0
  """
  picture = Picture(picture)
  w = w_at(spec, k, tau)
  if picture == Picture.SCHROEDINGER:
    matrix = schroedinger_matrix(w)
  else:
    matrix = interaction_matrix(w, tau)
  return TwoLevelHamiltonian(matrix=matrix, tau=tau, w=w, picture=picture)


def _eigenvector(w: complex, e: complex) -> np.ndarray:
  # two null vectors of H - e; take the better conditioned one
  first = np.array([w, 1 + e - w], dtype=complex)
  second = np.array([1 - w - e, w], dtype=complex)
  vector = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
  return vector / np.linalg.norm(vector)


def _condition(w: complex, e_plus: complex, e_minus: complex) -> float:
  basis = np.column_stack([_eigenvector(w, e_plus), _eigenvector(w, e_minus)])
  s = np.linalg.svd(basis, compute_uv=False)
  return float('inf') if s[-1] <= s[0] * np.finfo(float).eps else float(s[0] / s[-1])


def spectral_diagnostic(
  spec: PotentialSpec, k: float, tau: float, coalescence_tol: Optional[float] = None
) -> SpectralDiagnostic:
  """Eigenvalues +/- sqrt(1 - 2w) of H(tau) and related diagnostics.

  The exceptional flag trips when |1 - v/k^2| <= coalescence_tol, i.e. at
  classical turning points. The pseudo-Hermiticity residual is the Frobenius
  norm of H^dagger - sigma_3 H sigma_3, which vanishes exactly for real v.
  """
  if coalescence_tol is None:
    coalescence_tol = get_settings().spectral.coalescence_tol
  w = w_at(spec, k, tau)
  h = schroedinger_matrix(w)
  n = complex(principal_sqrt(1 - 2 * w))
  residual = float(np.linalg.norm(h.conj().T - SIGMA_3 @ h @ SIGMA_3))
  return SpectralDiagnostic(
    tau=tau,
    e_plus=n,
    e_minus=-n,
    n_of_tau=n,
    exceptional=bool(abs(1 - 2 * w) <= coalescence_tol),
    pseudo_hermitian_residual=residual,
    eigenvector_condition=_condition(w, n, -n),
  )
