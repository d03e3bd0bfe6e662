"""First-Born inverse scattering.

Off-diagonal route: v(x) = 4 M12'(2x) = -4 M21'(-2x), where ' is the
derivative of the inverse transform (1/2pi) int e^{iky} M(k) dk.

Reflection routes: with alpha = v~(0),
  right: v(x) = 4 R'(2x) - 2 alpha R(2x)     (R = inverse transform of R^r_1)
  left:  v(x) = 4 R'(-2x) - 2 alpha R(-2x)   (R = inverse transform of R^l_1)
and alpha (1 + int R) = 2 [R(+inf) - R(-inf)] in both cases.
"""

import math
import warnings
from typing import Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.interpolate import CubicSpline
from scipy.special import erf

from wavetm.config import get_settings
from wavetm.errors import (
  DegenerateAlphaDenominator,
  InputError,
  NonSmoothData,
  TailNonconvergence,
  TruncationWarning,
)
from wavetm.logging_config import get_logger
from wavetm.potential_model import PotentialSpec, evaluate, fourier1

logger = get_logger(__name__)

DataKind = Literal['M12', 'M21', 'R_right', 'R_left']
Route = Literal['m12', 'm21', 'rr', 'rl']

ROUTE_KINDS: Dict[str, str] = {'m12': 'M12', 'm21': 'M21', 'rr': 'R_right', 'rl': 'R_left'}

# output grids are never coarser than this many points
_MIN_POINTS = 2**16
# symmetric probe offset around k = 0
_PROBE = 1e-5
# central-difference step for registered closed forms
_CD_STEP = 1e-4

KFunction = Callable[[np.ndarray], np.ndarray]


class AnalyticData(BaseModel):
  """A registered first-Born data set with optional x-space closed form."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  name: str
  kind: DataKind
  defaults: Dict[str, float]
  k_space: Callable[..., np.ndarray]
  x_space: Optional[Callable[..., np.ndarray]] = None


def _barrier_m12(k, z, L):
  return z * (np.exp(-2j * k * L) - 1) / (4 * k * k)


def _barrier_m12_x(y, z, L):
  return z * (np.abs(y) - np.abs(2 * L - y)) / 8 + 0j


def _two_block_m12(k, z, L, J):
  return z * (np.exp(-2j * L * k) - 1) * (np.exp(-2j * (L + J) * k) - 1) / (4 * k * k)


def _gaussian_m12(k, z, L):
  return z * np.exp(-((L * k) ** 2)) + 0j


def _gaussian_m12_x(y, z, L):
  return z * np.exp(-(y**2) / (4 * L * L)) / (2 * math.sqrt(math.pi) * L) + 0j


def _gaussian_over_k_m12(k, z, L):
  return z / (L * k) * np.exp(-((L * k) ** 2)) + 0j


def _gaussian_over_k_m12_x(y, z, L):
  return 0.5j * z / L * erf(y / (2 * L))


def _inf_range_rl(k, z, K, L):
  return z * (k / K - 1) ** 2 * np.exp(-(L**2) * (k - K) ** 2) + 0j


REGISTERED: Dict[str, AnalyticData] = {
  item.name: item
  for item in [
    AnalyticData(
      name='barrier_m12',
      kind='M12',
      defaults={'z': 1.0, 'L': 1.0},
      k_space=_barrier_m12,
      x_space=_barrier_m12_x,
    ),
    AnalyticData(
      name='two_block_m12',
      kind='M12',
      defaults={'z': 1.0, 'L': 1.0, 'J': 0.5},
      k_space=_two_block_m12,
    ),
    AnalyticData(
      name='gaussian_m12',
      kind='M12',
      defaults={'z': 1.0, 'L': 1.0},
      k_space=_gaussian_m12,
      x_space=_gaussian_m12_x,
    ),
    AnalyticData(
      name='gaussian_over_k_m12',
      kind='M12',
      defaults={'z': 1.0, 'L': 1.0},
      k_space=_gaussian_over_k_m12,
      x_space=_gaussian_over_k_m12_x,
    ),
    AnalyticData(
      name='inf_range_rl',
      kind='R_left',
      defaults={'z': 1.0, 'K': 2.0, 'L': 1.0},
      k_space=_inf_range_rl,
    ),
  ]
}


class FirstBornData(BaseModel):
  """First-Born transfer-matrix entry or reflection amplitude as a function of k.

  Exactly one of `function` (vectorized in k) or the table (`k`, `values`,
  symmetric about k = 0) is given. `x_space` is an optional closed form of
  the inverse transform.
  """

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  kind: DataKind
  function: Optional[KFunction] = None
  k: Optional[np.ndarray] = None
  values: Optional[np.ndarray] = None
  k_max: Optional[float] = None
  half_window: Optional[float] = None
  x_space: Optional[Callable[[np.ndarray], np.ndarray]] = None
  label: str = ''
  notes: List[str] = []

  @model_validator(mode='after')
  def _check_source(self) -> 'FirstBornData':
    tabulated = self.k is not None or self.values is not None
    if (self.function is None) == (not tabulated):
      raise ValueError('give either a function or a (k, values) table')
    if tabulated:
      k = np.asarray(self.k, dtype=float)
      values = np.asarray(self.values, dtype=complex)
      if k.shape != values.shape or k.ndim != 1 or k.size < 8:
        raise ValueError('k and values must be 1-d arrays of equal length (at least 8)')
      if np.any(np.diff(k) <= 0):
        raise ValueError('k must be strictly increasing')
      if not math.isclose(k[0], -k[-1], rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError('k grid must be symmetric about 0')
      finite = np.isfinite(values) | (k == 0)
      if not finite.all():
        raise ValueError('values must be finite away from k = 0')
    return self

  def __add__(self, other: 'FirstBornData') -> 'FirstBornData':
    """Sum of two callable data sets of the same kind."""
    if self.kind != other.kind or self.function is None or other.function is None:
      raise InputError('only callable data of the same kind can be added', 'kind')
    f, g = self.function, other.function
    return FirstBornData(
      kind=self.kind,
      function=lambda k: f(k) + g(k),
      k_max=self.k_max,
      half_window=self.half_window,
      label=f'{self.label}+{other.label}',
      notes=[*self.notes, *other.notes],
    )


def registered_data(name: str, **params: float) -> FirstBornData:
  """First-Born data from the registry with parameters overriding the defaults."""
  if name not in REGISTERED:
    raise InputError(f'unknown data set {name!r}; known: {sorted(REGISTERED)}', 'data')
  item = REGISTERED[name]
  unknown = set(params) - set(item.defaults)
  if unknown:
    raise InputError(f'unknown parameters {sorted(unknown)} for {name}', 'data')
  values = {**item.defaults, **params}

  def k_space(k: np.ndarray) -> np.ndarray:
    return item.k_space(k, **values)

  def x_space(y: np.ndarray) -> np.ndarray:
    return item.x_space(y, **values)

  return FirstBornData(
    kind=item.kind,
    function=k_space,
    x_space=x_space if item.x_space is not None else None,
    label=name,
  )


def data_from_spec(spec: PotentialSpec, kind: DataKind) -> FirstBornData:
  """Forward first-Born data of a k-independent potential.

  k_squared couplings are inverted as v/(c k^2), i.e. the spec with a unit
  constant coupling. The conversion is recorded in `notes`.
  """
  if spec.distributional:
    raise InputError('delta potentials have no pointwise reconstruction', 'spec.family')
  notes = []
  if spec.coupling.kind != 'constant':
    notes.append(f'coupling k_squared c={spec.coupling.c:g} inverted as v/(c k^2)')
    logger.info('%s: %s', spec.family.value, notes[-1])
    spec = spec.model_copy(update={'coupling': type(spec.coupling)()})
  v0 = complex(fourier1(spec, 0.0))

  def m12(k):
    return -0.5j / k * fourier1(spec, 2 * k)

  def m21(k):
    return 0.5j / k * fourier1(spec, -2 * k)

  def r_right(k):
    return fourier1(spec, 2 * k) / (2j * k - v0)

  def r_left(k):
    return fourier1(spec, -2 * k) / (2j * k - v0)

  functions = {'M12': m12, 'M21': m21, 'R_right': r_right, 'R_left': r_left}
  return FirstBornData(
    kind=kind, function=functions[kind], label=spec.family.value, notes=notes
  )


class InverseTransform(BaseModel):
  """Samples of (1/2pi) int e^{iky} f(k) dk and its derivative on a uniform y grid."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  y: np.ndarray
  values: np.ndarray
  derivative: np.ndarray
  k_max: float
  half_window: float
  residue: complex = 0j
  at_zero: complex = 0j
  truncated: bool = False
  closed_form: bool = False

  def _spline(self, samples: np.ndarray, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    inside = (y >= self.y[0]) & (y <= self.y[-1])
    re = CubicSpline(self.y, samples.real)(np.clip(y, self.y[0], self.y[-1]))
    im = CubicSpline(self.y, samples.imag)(np.clip(y, self.y[0], self.y[-1]))
    return np.where(inside, re + 1j * im, np.nan)

  def at(self, y) -> np.ndarray:
    """Interpolated transform (nan outside the window)."""
    return self._spline(self.values, y)

  def derivative_at(self, y) -> np.ndarray:
    """Interpolated derivative (nan outside the window)."""
    return self._spline(self.derivative, y)


def _taper(k: np.ndarray, k_max: float, fraction: float) -> np.ndarray:
  start = (1 - fraction) * k_max
  weights = np.ones_like(k)
  a = np.abs(k)
  band = (a > start) & (a <= k_max)
  weights[band] = 0.5 * (1 + np.cos(math.pi * (a[band] - start) / (k_max - start)))
  weights[a > k_max] = 0.0
  return weights


class _Sampler:
  """Pole-split, uniformly evaluable view of the data."""

  def __init__(self, data: FirstBornData):
    self.data = data
    self.kappa = 1.0
    if data.function is not None:
      self.residue = self._probe_residue(data.function)
      self.raw = data.function
      self.table_max = None
    else:
      k = np.asarray(data.k, dtype=float)
      values = np.asarray(data.values, dtype=complex)
      self.residue = self._richardson_residue(k, values)
      keep = k != 0
      split = values[keep] - self._pole(k[keep])
      zero = self._symmetric_zero(k[keep], split)
      grid = np.concatenate([k[keep], [0.0]])
      order = np.argsort(grid)
      samples = np.concatenate([split, [zero]])[order]
      self.spline_re = CubicSpline(grid[order], samples.real)
      self.spline_im = CubicSpline(grid[order], samples.imag)
      self.raw = None
      self.table_max = float(k[-1])

  @staticmethod
  def _probe_residue(f: KFunction) -> complex:
    # k (f(k) - f(-k))/2 = r + O(k^2); combining two offsets cancels the k^2 term
    probe = np.array([_PROBE, -_PROBE, 2 * _PROBE, -2 * _PROBE])
    values = np.asarray(f(probe), dtype=complex)
    near = _PROBE * (values[0] - values[1]) / 2
    far = _PROBE * (values[2] - values[3])
    residue = (4 * near - far) / 3
    size = _PROBE * float(np.max(np.abs(values)))
    return complex(residue) if abs(residue) > 1e-6 * size else 0j

  @staticmethod
  def _richardson_residue(k: np.ndarray, values: np.ndarray) -> complex:
    positive = np.where(k > 0)[0][:2]
    if positive.size < 2:
      return 0j
    estimates = []
    for i in positive:
      j = np.argmin(np.abs(k + k[i]))
      estimates.append((k[i] * values[i] + k[j] * values[j]) / 2)
    k1, k2 = k[positive]
    residue = (k2**2 * estimates[0] - k1**2 * estimates[1]) / (k2**2 - k1**2)
    size = k1 * float(np.max(np.abs(values[positive[0]])))
    return complex(residue) if abs(residue) > 1e-6 * size else 0j

  @staticmethod
  def _symmetric_zero(k: np.ndarray, values: np.ndarray) -> complex:
    i = np.argmin(np.where(k > 0, k, np.inf))
    j = np.argmin(np.abs(k + k[i]))
    return complex((values[i] + values[j]) / 2)

  def _pole(self, k: np.ndarray) -> np.ndarray:
    if self.residue == 0:
      return np.zeros_like(k, dtype=complex)
    return self.residue * np.exp(-((k / self.kappa) ** 2)) / k

  def pole_transform(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Inverse transform of the split-off pole term and its derivative."""
    u = self.kappa * y / 2
    value = 0.5j * self.residue * erf(u)
    slope = 0.5j * self.residue * self.kappa / math.sqrt(math.pi) * np.exp(-(u**2))
    return value, slope

  def __call__(self, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if self.raw is None:
      inside = np.abs(k) <= self.table_max
      out = self.spline_re(k) + 1j * self.spline_im(k)
      return np.where(inside, out, 0j)
    out = np.zeros(k.shape, dtype=complex)
    nonzero = k != 0
    out[nonzero] = np.asarray(self.raw(k[nonzero]), dtype=complex) - self._pole(k[nonzero])
    if not nonzero.all():
      probe = np.array([_PROBE, -_PROBE])
      both = np.asarray(self.raw(probe), dtype=complex) - self._pole(probe)
      out[~nonzero] = both.mean()
    return out


def _choose_k_max(sampler: _Sampler, data: FirstBornData) -> Tuple[float, bool]:
  settings = get_settings().inverse
  if data.k_max is not None:
    k_max = data.k_max
  elif sampler.table_max is not None:
    k_max = sampler.table_max
  else:
    k_max = settings.k_max_initial
  while True:
    band = np.linspace(0.9 * k_max, k_max, 64)
    edge = float(np.max(np.abs(sampler(np.concatenate([band, -band])))))
    peak = float(np.max(np.abs(sampler(np.linspace(-k_max, k_max, 4097)))))
    fixed = data.k_max is not None or sampler.table_max is not None
    if fixed or edge <= settings.decay_threshold * peak or k_max >= settings.k_max_cap:
      break
    k_max = min(2 * k_max, settings.k_max_cap)
  truncated = peak > 0 and edge > settings.truncation_warning * peak
  if truncated:
    warnings.warn(
      f'first-Born data still at {edge / peak:.2e} of peak at k_max={k_max:g}',
      TruncationWarning,
      stacklevel=3,
    )
  return k_max, truncated


def _central_difference(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray) -> np.ndarray:
  h = _CD_STEP
  return (f(y - 2 * h) - 8 * f(y - h) + 8 * f(y + h) - f(y + 2 * h)) / (12 * h)


def inverse_fourier(
  data: FirstBornData,
  half_window: Optional[float] = None,
  taper_fraction: Optional[float] = None,
) -> InverseTransform:
  """Inverse Fourier transform of first-Born data on y in [-X, X).

  Callable data are sampled on an FFT grid with spacing pi/X up to a k_max
  found by doubling until the data decay; a 1/k pole at k = 0 is split off
  and transformed in closed form (an erf). Registered x-space closed forms
  are used directly, with a fourth-order central-difference derivative.

  Warns:
      TruncationWarning: when the data at k_max exceed the configured fraction of the peak
  """
  settings = get_settings().inverse
  window = half_window or data.half_window or settings.half_window
  taper_fraction = settings.taper_fraction if taper_fraction is None else taper_fraction
  if data.x_space is not None:
    y = np.linspace(-window, window, _MIN_POINTS, endpoint=False)
    values = np.asarray(data.x_space(y), dtype=complex)
    derivative = _central_difference(lambda t: np.asarray(data.x_space(t), dtype=complex), y)
    return InverseTransform(
      y=y,
      values=values,
      derivative=derivative,
      k_max=math.inf,
      half_window=window,
      closed_form=True,
    )
  sampler = _Sampler(data)
  k_max, truncated = _choose_k_max(sampler, data)
  dk = math.pi / window
  n = max(_MIN_POINTS, 1 << math.ceil(math.log2(2 * k_max / dk + 1)))
  k = (np.arange(n) - n // 2) * dk
  samples = np.zeros(n, dtype=complex)
  band = np.abs(k) <= k_max
  samples[band] = sampler(k[band]) * _taper(k[band], k_max, taper_fraction)
  scale = n * dk / (2 * math.pi)
  values = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(samples))) * scale
  derivative = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(1j * k * samples))) * scale
  y = (np.arange(n) - n // 2) * (2 * window / n)
  pole_value, pole_slope = sampler.pole_transform(y)
  logger.debug('inverse transform: k_max=%g, %d points, residue %s', k_max, n, sampler.residue)
  return InverseTransform(
    y=y,
    values=values + pole_value,
    derivative=derivative + pole_slope,
    k_max=k_max,
    half_window=window,
    residue=sampler.residue,
    at_zero=complex(sampler(np.array([0.0]))[0]),
    truncated=truncated,
  )


class ReconstructedPotential(BaseModel):
  """Reconstructed v(x) on a grid."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  x: np.ndarray
  values: np.ndarray
  route: Route
  alpha: Optional[complex] = None
  k_max: float
  half_window: float
  truncated: bool = False
  notes: List[str] = []

  def at(self, x) -> np.ndarray:
    """Cubic interpolation of the reconstruction (nan outside the grid)."""
    x = np.asarray(x, dtype=float)
    inside = (x >= self.x[0]) & (x <= self.x[-1])
    clipped = np.clip(x, self.x[0], self.x[-1])
    re = CubicSpline(self.x, self.values.real)(clipped)
    im = CubicSpline(self.x, self.values.imag)(clipped)
    return np.where(inside, re + 1j * im, np.nan)

  def to_frame(self) -> pd.DataFrame:
    """Columns x, re_v, im_v."""
    return pd.DataFrame({'x': self.x, 're_v': self.values.real, 'im_v': self.values.imag})


def _mapped(transform: InverseTransform, sign: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
  # x grid with y = sign * 2x inside the transform window, ascending
  x = np.sort(sign * transform.y / 2)
  y = sign * 2 * x
  return x, transform.at(y), transform.derivative_at(y)


def _expect(data: FirstBornData, kinds: Tuple[str, ...]) -> None:
  if data.kind not in kinds:
    raise InputError(f'expected data of kind {" or ".join(kinds)}, got {data.kind}', 'kind')


def potential_from_offdiagonal(
  data: FirstBornData, half_window: Optional[float] = None
) -> ReconstructedPotential:
  """v(x) = 4 M12'(2x) or -4 M21'(-2x).

  Raises:
      NonSmoothData: for tabulated data whose reconstruction depends on the taper
  """
  _expect(data, ('M12', 'M21'))
  sign = 1 if data.kind == 'M12' else -1
  transform = inverse_fourier(data, half_window)
  x, _, slope = _mapped(transform, sign)
  values = sign * 4 * slope
  notes = []
  if data.function is None:
    fraction = get_settings().inverse.taper_fraction
    alternative = inverse_fourier(data, half_window, taper_fraction=2 * fraction)
    _, _, other = _mapped(alternative, sign)
    interior = np.abs(x) < 0.8 * np.max(np.abs(x))
    spread = float(np.max(np.abs(sign * 4 * other - values)[interior]))
    size = float(np.max(np.abs(values[interior])))
    if size > 0 and spread > 0.1 * size:
      raise NonSmoothData(
        f'reconstruction changes by {spread / size:.1%} with the taper; smooth or extend the data'
      )
    notes.append(f'taper sensitivity {spread:.2e}')
  return ReconstructedPotential(
    x=x,
    values=values,
    route='m12' if sign == 1 else 'm21',
    k_max=transform.k_max,
    half_window=transform.half_window,
    truncated=transform.truncated,
    notes=notes,
  )


def _tail_means(transform: InverseTransform) -> Tuple[complex, complex, bool]:
  settings = get_settings().inverse
  y, values = transform.y, transform.values
  span = transform.half_window
  outer = np.abs(y) >= (1 - settings.tail_fraction / 2) * span
  inner = (np.abs(y) >= (1 - settings.tail_fraction) * span) & ~outer
  means = {}
  settled = True
  scale = float(np.max(np.abs(values))) or 1.0
  for side, mask in ((1, y > 0), (-1, y < 0)):
    far = values[outer & mask].mean()
    near = values[inner & mask].mean()
    means[side] = (far + near) / 2
    settled = settled and abs(far - near) <= 1e-6 * scale
  return means[1], means[-1], settled


def _alpha(
  data: FirstBornData, half_window: Optional[float], sign: int
) -> Tuple[complex, InverseTransform, List[str]]:
  settings = get_settings().inverse
  window = half_window or data.half_window or settings.half_window
  transform = inverse_fourier(data, window)
  integral = transform.at_zero if transform.residue == 0 else complex('nan')
  denominator = 1 + integral
  notes = [f'1 + int R = {denominator:.3e}']
  if np.isfinite(denominator) and abs(denominator) > settings.alpha_denominator_tol:
    for _ in range(settings.window_doublings):
      plus, minus, settled = _tail_means(transform)
      if settled:
        return 2 * (plus - minus) / denominator, transform, notes
      window *= 2
      transform = inverse_fourier(data, window)
    plus, minus, settled = _tail_means(transform)
    if not settled:
      raise TailNonconvergence(f'tail averages did not settle up to half window {window:g}')
    return 2 * (plus - minus) / denominator, transform, notes
  # v vanishes far out: fit A - alpha B = 0 on the tail bands
  x, value, slope = _mapped(transform, sign)
  tails = np.abs(x) >= (1 - settings.tail_fraction) * np.max(np.abs(x))
  a, b = 4 * slope[tails], 2 * value[tails]
  weight = float(np.sum(np.abs(b) ** 2))
  if math.sqrt(weight / max(1, tails.sum())) < settings.tail_fit_floor:
    raise DegenerateAlphaDenominator(
      f'1 + int R = {denominator:.3e} and the tails carry no signal to fit alpha'
    )
  notes.append('alpha from tail least squares')
  return complex(np.sum(np.conj(b) * a) / weight), transform, notes


def _potential_from_reflection(
  data: FirstBornData, half_window: Optional[float], sign: int, route: Route
) -> ReconstructedPotential:
  alpha, transform, notes = _alpha(data, half_window, sign)
  x, value, slope = _mapped(transform, sign)
  return ReconstructedPotential(
    x=x,
    values=4 * slope - 2 * alpha * value,
    route=route,
    alpha=alpha,
    k_max=transform.k_max,
    half_window=transform.half_window,
    truncated=transform.truncated,
    notes=notes,
  )


def potential_from_right_reflection(
  data: FirstBornData, half_window: Optional[float] = None
) -> ReconstructedPotential:
  """v(x) = 4 R'(2x) - 2 alpha R(2x) from first-order right reflection data.

  Raises:
      DegenerateAlphaDenominator: when alpha cannot be determined
      TailNonconvergence: when the tail limits do not settle
  """
  _expect(data, ('R_right',))
  return _potential_from_reflection(data, half_window, 1, 'rr')


def potential_from_left_reflection(
  data: FirstBornData, half_window: Optional[float] = None
) -> ReconstructedPotential:
  """v(x) = 4 R'(-2x) - 2 alpha R(-2x) from first-order left reflection data.

  The result is the potential whose forward first-order amplitude
  v~(-2k)/(2ik - v~(0)) equals the data. The left-route formula as usually
  printed, v = 2[d/dx + alpha] R(-2x), is the negative of this. For the data
  z (k/K - 1)^2 e^{-L^2 (k-K)^2} the result is the infinite-range family
  evaluated at -z.
  """
  _expect(data, ('R_left',))
  return _potential_from_reflection(data, half_window, -1, 'rl')


def reconstruct(
  data: FirstBornData, route: Route, half_window: Optional[float] = None
) -> ReconstructedPotential:
  """Dispatch on the route name (m12, m21, rr, rl)."""
  if route not in ROUTE_KINDS:
    raise InputError(f'unknown route {route!r}', 'route')
  if data.kind != ROUTE_KINDS[route]:
    raise InputError(f'route {route} needs {ROUTE_KINDS[route]} data, got {data.kind}', 'route')
  if route in ('m12', 'm21'):
    result = potential_from_offdiagonal(data, half_window)
  elif route == 'rr':
    result = potential_from_right_reflection(data, half_window)
  else:
    result = potential_from_left_reflection(data, half_window)
  if data.notes:
    result = result.model_copy(update={'notes': [*data.notes, *result.notes]})
  return result


class RoundTripReport(BaseModel):
  """Forward-then-inverse comparison against the original potential."""

  model_config = ConfigDict(frozen=True)

  route: Route
  sup_error: float
  l2_error: float
  alpha: Optional[complex] = None
  points: int
  excluded: float


def _comparison_grid(spec: PotentialSpec, exclusion: float, points: int) -> np.ndarray:
  lo, hi = spec.window()
  if spec.params.infinite:
    center = 0.5 * (lo + hi)
    radius = 0.5 * (hi - lo) / 2
    lo, hi = center - radius, center + radius
  margin = 0.25 * (hi - lo)
  x = np.linspace(lo - margin, hi + margin, points)
  width = exclusion * spec.params.length_scale()
  keep = np.ones_like(x, dtype=bool)
  for jump in spec.params.breakpoints():
    keep &= np.abs(x - jump) > width
  return x[keep]


def roundtrip_validate(
  spec: PotentialSpec,
  route: Route,
  exclusion: float = 0.02,
  points: int = 801,
  half_window: Optional[float] = None,
) -> RoundTripReport:
  """Reconstruct spec from its own first-Born data and measure the error.

  Points within exclusion * (envelope length) of a jump are skipped.
  """
  data = data_from_spec(spec, ROUTE_KINDS[route])
  result = reconstruct(data, route, half_window)
  x = _comparison_grid(spec, exclusion, points)
  x = x[(x >= result.x[0]) & (x <= result.x[-1])]
  if spec.coupling.kind != 'constant':
    spec = spec.model_copy(update={'coupling': type(spec.coupling)()})
  expected = evaluate(spec, x, 1.0)
  error = np.abs(result.at(x) - expected)
  step = x[1] - x[0] if x.size > 1 else 0.0
  return RoundTripReport(
    route=route,
    sup_error=float(error.max()) if error.size else 0.0,
    l2_error=float(math.sqrt(np.sum(error**2) * step)),
    alpha=result.alpha,
    points=int(x.size),
    excluded=exclusion,
  )
