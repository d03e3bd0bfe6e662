"""Exact transfer matrices from the interaction-picture evolution.

M is the evolution operator U(tau_+, tau_-) of i dU/dtau = H_I(tau) U with
U(tau_-) = 1, where H_I is the interaction-picture generator of the two-level
form. Delta potentials are impulsive: each contributes the exact jump
1 - (iz/2k) N(a) with N(a) = [[1, e^{-2ika}], [-e^{2ika}, -1]].
"""

import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import solve_ivp

from wavetm.config import get_settings
from wavetm.errors import (
  IntegrationFailure,
  InvalidWavenumber,
  SpectralSingularity,
  UnsupportedFamily,
  WavenumberMismatch,
)
from wavetm.logging_config import get_logger
from wavetm.potential_model import (
  Family,
  PotentialSpec,
  complex_pair,
  integration_window,
  make_spec,
  principal_sqrt,
)
from wavetm.two_level import interaction_matrix

logger = get_logger(__name__)

IDENTITY = np.eye(2, dtype=complex)

# more breakpoints than this (sampled grids) are integrated as one segment
_MAX_SEGMENTS = 64


class TransferMatrix(BaseModel):
  """2x2 transfer matrix at one wavenumber."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  entries: np.ndarray
  k: float
  method: str
  det_residual: float

  @classmethod
  def build(cls, entries: np.ndarray, k: float, method: str) -> 'TransferMatrix':
    """Wrap a matrix and record |det M - 1|."""
    entries = np.array(entries, dtype=complex).reshape(2, 2)
    entries.setflags(write=False)
    residual = float(abs(np.linalg.det(entries) - 1))
    return cls(entries=entries, k=k, method=method, det_residual=residual)

  @property
  def m11(self) -> complex:
    """Entry (1, 1)."""
    return complex(self.entries[0, 0])

  @property
  def m12(self) -> complex:
    """Entry (1, 2)."""
    return complex(self.entries[0, 1])

  @property
  def m21(self) -> complex:
    """Entry (2, 1)."""
    return complex(self.entries[1, 0])

  @property
  def m22(self) -> complex:
    """Entry (2, 2)."""
    return complex(self.entries[1, 1])

  def to_json(self) -> dict:
    """Entries as [re, im] pairs in row-major order."""
    return {
      'k': self.k,
      'method': self.method,
      'M': [complex_pair(v) for v in self.entries.ravel()],
      'det_residual': self.det_residual,
    }


class ScatteringAmplitudes(BaseModel):
  """Left/right reflection and transmission amplitudes."""

  model_config = ConfigDict(frozen=True)

  r_left: complex
  r_right: complex
  t: complex
  k: float
  order: str = 'exact'

  def to_json(self) -> dict:
    """Amplitudes as [re, im] pairs."""
    return {
      'Rl': complex_pair(self.r_left),
      'Rr': complex_pair(self.r_right),
      'T': complex_pair(self.t),
      'order': self.order,
    }


def _check_k(k: float) -> None:
  if not k > 0:
    raise InvalidWavenumber(f'wavenumber must be positive, got {k}')


def impulse_matrix(a: float, z: complex, k: float) -> np.ndarray:
  """Exact transfer matrix of z delta(x - a)."""
  n = np.array([[1, np.exp(-2j * k * a)], [-np.exp(2j * k * a), -1]], dtype=complex)
  return IDENTITY - 1j * z / (2 * k) * n


def _segments(spec: PotentialSpec, k: float) -> List[Tuple[float, float]]:
  lo, hi = integration_window(spec, k)
  points = [p for p in spec.params.breakpoints() if lo < p < hi]
  if len(points) > _MAX_SEGMENTS:
    points = []
  edges = [lo, *sorted(set(points)), hi]
  return [(k * a, k * b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def propagate(
  spec: PotentialSpec,
  k: float,
  rhs: Callable[[np.ndarray, np.ndarray], np.ndarray],
  y0: np.ndarray,
  tol: Optional[float] = None,
  atol: Optional[np.ndarray] = None,
) -> np.ndarray:
  """Integrate dy/dtau = rhs(H_I(tau), y) across the support of spec.

  Args:
      spec: Non-distributional potential
      k: Wavenumber
      rhs: Map (interaction generator, state) -> derivative
      y0: Complex initial state
      tol: Relative tolerance of the embedded Runge-Kutta pair
      atol: Absolute tolerance (scalar or per component)

  Returns:
      State at tau_+

  Raises:
      IntegrationFailure: when the integrator stops early
  """
  settings = get_settings().ode
  tol = settings.tol if tol is None else tol
  atol = settings.atol_floor if atol is None else atol
  scale = 2 * k * k
  factor = spec.coupling.factor(k)
  params = spec.params
  max_step = min(settings.max_step, k * params.length_scale() / 4)

  def derivative(tau: float, y: np.ndarray) -> np.ndarray:
    w = factor * params.shape(tau / k) / scale
    return rhs(interaction_matrix(w, tau), y)

  y = np.asarray(y0, dtype=complex)
  for start, stop in _segments(spec, k):
    solution = solve_ivp(
      derivative, (start, stop), y, method='DOP853', rtol=tol, atol=atol, max_step=max_step
    )
    if not solution.success:
      raise IntegrationFailure(f'stopped at tau={solution.t[-1]}: {solution.message}')
    y = solution.y[:, -1]
  return y


def transfer_matrix_ode(
  spec: PotentialSpec, k: float, tol: Optional[float] = None
) -> TransferMatrix:
  """Exact transfer matrix by integrating the interaction-picture evolution.

  Args:
      spec: Potential
      k: Wavenumber (> 0)
      tol: Local relative tolerance

  Returns:
      TransferMatrix with method 'ode'
  """
  _check_k(k)
  if spec.distributional:
    factor = spec.coupling.factor(k)
    matrix = IDENTITY
    for a, z in spec.params.impulses():
      matrix = impulse_matrix(a, factor * z, k) @ matrix
    return TransferMatrix.build(matrix, k, 'ode')

  def rhs(h: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (-1j * h @ y.reshape(2, 2)).ravel()

  y = propagate(spec, k, rhs, IDENTITY.ravel(), tol)
  result = TransferMatrix.build(y, k, 'ode')
  logger.debug('ode transfer matrix at k=%g, det residual %.2e', k, result.det_residual)
  return result


def amplitudes_from_transfer(
  m: TransferMatrix, singularity_tol: Optional[float] = None
) -> ScatteringAmplitudes:
  """T = 1/M22, R^r = M12/M22, R^l = -M21/M22.

  Raises:
      SpectralSingularity: when |M22| is below singularity_tol * |M|
  """
  if singularity_tol is None:
    singularity_tol = get_settings().spectral.singularity_tol
  norm = float(np.linalg.norm(m.entries))
  if abs(m.m22) <= singularity_tol * norm:
    raise SpectralSingularity(f'M22 vanishes at k={m.k} (|M22|={abs(m.m22):.3e})')
  t = 1 / m.m22
  r_right = m.m12 / m.m22
  r_left = -m.m21 / m.m22
  residual = abs(m.m11 - (t - r_left * r_right / t))
  if residual > 1e-9 * max(1.0, abs(m.m11)):
    logger.warning('M11 = T - Rl Rr / T violated by %.2e at k=%g', residual, m.k)
  order = 'exact' if m.method in ('ode', 'analytic') else m.method
  return ScatteringAmplitudes(r_left=r_left, r_right=r_right, t=t, k=m.k, order=order)


def transfer_from_amplitudes(amplitudes: ScatteringAmplitudes) -> TransferMatrix:
  """Inverse of amplitudes_from_transfer."""
  t, r_left, r_right = amplitudes.t, amplitudes.r_left, amplitudes.r_right
  entries = [[t - r_left * r_right / t, r_right / t], [-r_left / t, 1 / t]]
  return TransferMatrix.build(entries, amplitudes.k, amplitudes.order)


def compose(m_right: TransferMatrix, m_left: TransferMatrix) -> TransferMatrix:
  """Transfer matrix of two adjacent pieces: m_right @ m_left.

  Raises:
      WavenumberMismatch: when the factors were computed at different k
  """
  if not math.isclose(m_right.k, m_left.k, rel_tol=1e-12, abs_tol=1e-15):
    raise WavenumberMismatch(f'cannot compose k={m_right.k} with k={m_left.k}')
  method = m_right.method if m_right.method == m_left.method else 'composed'
  return TransferMatrix.build(m_right.entries @ m_left.entries, m_right.k, method)


def barrier_entries(z: complex, length: float, k: float, x0: float = 0.0) -> np.ndarray:
  """Closed-form transfer matrix of z on (x0, x0 + length); k may be negative.

  Entries depend on n = sqrt(1 - z/k^2) only through n^2, cos(nkL) and
  sin(nkL)/n, so the branch of n is irrelevant; sin(nkL)/n uses its Taylor
  series near n = 0.
  """
  n2 = 1 - z / (k * k)
  n = complex(principal_sqrt(n2))
  phase = n * k * length
  c = np.cos(phase)
  if abs(phase) < 1e-4:
    s = k * length * (1 - phase**2 / 6 + phase**4 / 120)
  else:
    s = np.sin(phase) / n
  back = np.exp(-1j * k * length)
  shift = np.exp(-2j * k * x0)
  m11 = (c + 0.5j * (n2 + 1) * s) * back
  m12 = 0.5j * (n2 - 1) * s * back * shift
  m21 = -0.5j * (n2 - 1) * s / back / shift
  m22 = (c - 0.5j * (n2 + 1) * s) / back
  return np.array([[m11, m12], [m21, m22]], dtype=complex)


def first_order_matrix(single: Callable[[float], complex], k: float) -> np.ndarray:
  """M^(1) = (-i/2k) [[v(0), v(2k)], [-v(-2k), -v(0)]] from the single transform."""
  v0, vp, vm = single(0.0), single(2 * k), single(-2 * k)
  return -0.5j / k * np.array([[v0, vp], [-vm, -v0]], dtype=complex)


def second_order_matrix(double: Callable[[float, float], complex], k: float) -> np.ndarray:
  """M^(2) assembled from the ordered double transform."""
  q = 2 * k
  v00 = double(0.0, 0.0)
  entries = [
    [v00 - double(-q, q), double(q, 0.0) - double(0.0, q)],
    [double(-q, 0.0) - double(0.0, -q), v00 - double(q, -q)],
  ]
  return -np.array(entries, dtype=complex) / (4 * k * k)


def analytic_transfer(spec: PotentialSpec, k: float) -> TransferMatrix:
  """Closed-form transfer matrix for barriers and delta pairs.

  k may be negative, which gives the reflected-wavenumber matrices used in the
  M11(k) = M22(-k), M12(k) = M21(-k) checks.

  Raises:
      UnsupportedFamily: for any other family
  """
  if k == 0:
    raise InvalidWavenumber('wavenumber must be nonzero')
  factor = spec.coupling.factor(k)
  params = spec.params
  if spec.family == Family.RECTANGULAR_BARRIER:
    entries = barrier_entries(factor * params.z, params.L, k, params.x0)
  elif spec.family == Family.DELTA_PAIR:
    scaled = params.scaled(factor)
    # the Born series of a delta pair stops at second order
    entries = (
      IDENTITY
      + first_order_matrix(lambda q: complex(scaled.fourier1(q)), k)
      + second_order_matrix(lambda q1, q2: complex(scaled.fourier2(q1, q2)), k)
    )
  else:
    raise UnsupportedFamily(f'no closed-form transfer matrix for {spec.family.value}')
  return TransferMatrix.build(entries, k, 'analytic')


def narrow_rectangle_oracle(spec: PotentialSpec, k: float, width: float = 1e-4) -> TransferMatrix:
  """Delta pair replaced by equal-area rectangles of the given width."""
  if spec.family != Family.DELTA_PAIR:
    raise UnsupportedFamily('the narrow-rectangle oracle applies to delta pairs')
  factor = spec.coupling.factor(k)
  matrix = TransferMatrix.build(IDENTITY, k, 'analytic')
  for a, z in spec.params.impulses():
    piece = make_spec(
      Family.RECTANGULAR_BARRIER, z=factor * z / width, L=width, x0=a - width / 2
    )
    matrix = compose(analytic_transfer(piece, k), matrix)
  return matrix
