"""Potential families, their evaluation and their Fourier transforms.

Sign convention: f~(q) = integral of e^{-iqx} f(x) dx. The ordered double
transform is taken over x1 < x2 with q1 paired to x1, which is the ordering
the second Born term is built on. theta(0) = 0, so coincident delta
positions contribute nothing to the ordered transform.
"""

import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import (
  Annotated,
  Any,
  Callable,
  ClassVar,
  Dict,
  List,
  Literal,
  Optional,
  Tuple,
  Union,
)

import numpy as np
from pydantic import (
  BaseModel,
  BeforeValidator,
  ConfigDict,
  Field,
  PlainSerializer,
  SerializeAsAny,
  field_validator,
  model_validator,
)

from wavetm.config import get_settings
from wavetm.errors import (
  DistributionalPotential,
  InvalidWavenumber,
  NotPeriodic,
  PeriodMismatch,
  TruncationWarning,
  UnsupportedFamily,
)
from wavetm.logging_config import get_logger
from wavetm.quadrature import integrate, integrate_ordered

logger = get_logger(__name__)

# |theta * L| below this uses the series of (e^{i theta L} - 1)/(i theta)
_SMALL_PHASE = 1e-8


def parse_complex(value: Any) -> complex:
  """Accept [re, im], a number, or a complex-literal string."""
  if isinstance(value, (list, tuple)):
    if len(value) != 2:
      raise ValueError('complex values are [re, im] pairs')
    return complex(float(value[0]), float(value[1]))
  if isinstance(value, str):
    return complex(value.replace(' ', '').replace('i', 'j'))
  return complex(value)


def complex_pair(value: complex) -> List[float]:
  """Serialize a complex number as [re, im]."""
  return [float(value.real), float(value.imag)]


Complex = Annotated[
  complex, BeforeValidator(parse_complex), PlainSerializer(complex_pair, return_type=list)
]


def principal_sqrt(value):
  """Principal square root with the branch cut on the negative real axis.

  A negative zero imaginary part is normalized so that sqrt(-1) = +i.
  """
  value = np.asarray(value, dtype=complex)
  return np.sqrt(value.real + 1j * (value.imag + 0.0))


def phase_integral(theta, length: float):
  """Integral of e^{i theta x} over [0, length], with the analytic limit at theta = 0."""
  theta = np.asarray(theta, dtype=complex)
  small = np.abs(theta) * length < _SMALL_PHASE
  safe = np.where(small, 1.0, theta)
  exact = (np.exp(1j * safe * length) - 1.0) / (1j * safe)
  series = length * (1.0 + 0.5j * theta * length)
  return np.where(small, series, exact)


def _moment_integral(theta, length: float):
  """Integral of x e^{i theta x} over [0, length]."""
  theta = np.asarray(theta, dtype=complex)
  small = np.abs(theta) * length < _SMALL_PHASE
  safe = np.where(small, 1.0, theta)
  phase = np.exp(1j * safe * length)
  exact = -1j * length * phase / safe + (phase - 1.0) / safe**2
  series = length**2 / 2 + 1j * theta * length**3 / 3
  return np.where(small, series, exact)


def ordered_phase_integral(t1, t2, length: float):
  """Integral of e^{i t2 x2} e^{i t1 x1} over 0 < x1 < x2 < length."""
  t1 = np.asarray(t1, dtype=complex)
  t2 = np.asarray(t2, dtype=complex)
  small = np.abs(t1) * length < _SMALL_PHASE
  safe = np.where(small, 1.0, t1)
  exact = (phase_integral(safe + t2, length) - phase_integral(t2, length)) / (1j * safe)
  return np.where(small, _moment_integral(t2, length), exact)


class Family(str, Enum):
  """Potential families."""

  DELTA_PAIR = 'delta_pair'
  RECTANGULAR_BARRIER = 'rectangular_barrier'
  TRUNCATED_EXPONENTIAL = 'truncated_exponential'
  LOCALLY_PERIODIC_FOURIER = 'locally_periodic_fourier'
  GAUSSIAN_DERIVATIVE = 'gaussian_derivative'
  GAUSSIAN_PLAIN = 'gaussian_plain'
  GEOMETRIC_SERIES_PERIODIC = 'geometric_series_periodic'
  INFINITE_RANGE_ANALYTIC = 'infinite_range_analytic'
  SAMPLED_GRID = 'sampled_grid'


class Coupling(BaseModel):
  """Coupling law: constant, or z = c k^2 (k_squared_scaled)."""

  model_config = ConfigDict(frozen=True)

  kind: Literal['constant', 'k_squared'] = 'constant'
  c: float = 1.0

  @model_validator(mode='before')
  @classmethod
  def _parse(cls, data: Any) -> Any:
    if data is None or data == 'constant':
      return {'kind': 'constant'}
    if isinstance(data, dict) and 'k_squared' in data:
      return {'kind': 'k_squared', 'c': float(data['k_squared'])}
    return data

  def factor(self, k: Optional[float]) -> float:
    """Multiplier applied to the family's coupling constants at wavenumber k."""
    if self.kind == 'constant':
      return 1.0
    if k is None:
      raise InvalidWavenumber('k_squared coupling needs a wavenumber')
    return self.c * k * k

  def to_json(self) -> Union[str, Dict[str, float]]:
    """Spec-file form of the coupling."""
    return 'constant' if self.kind == 'constant' else {'k_squared': self.c}


class FamilyParams(BaseModel):
  """Parameters shared by every family."""

  model_config = ConfigDict(frozen=True, populate_by_name=True)

  distributional: ClassVar[bool] = False
  infinite: ClassVar[bool] = False

  def natural_support(self) -> Tuple[float, float]:
    """Support interval implied by the parameters."""
    raise NotImplementedError

  def window(self) -> Tuple[float, float]:
    """Finite interval used for integration."""
    return self.natural_support()

  def breakpoints(self) -> List[float]:
    """Points where the potential may jump."""
    lo, hi = self.window()
    return [lo, hi]

  def length_scale(self) -> float:
    """Largest panel width that resolves the envelope."""
    lo, hi = self.window()
    return hi - lo

  def oscillation(self) -> float:
    """Largest internal wavenumber of the potential."""
    return 0.0

  def shape(self, x: np.ndarray) -> np.ndarray:
    """v(x) at unit coupling factor (vectorized)."""
    raise DistributionalPotential(f'{type(self).__name__} has no pointwise values')

  def scaled(self, factor: complex) -> 'FamilyParams':
    """Copy with every coupling constant multiplied by factor."""
    return self.model_copy(update={'z': self.z * factor})

  def fourier1(self, q):
    """Closed-form single transform, or None."""
    return None

  def fourier2(self, q1, q2):
    """Closed-form ordered double transform, or None."""
    return None


class DeltaPairParams(FamilyParams):
  """z1 delta(x - a1) + z2 delta(x - a2)."""

  distributional: ClassVar[bool] = True

  z1: Complex
  z2: Complex
  a1: float
  a2: float

  def natural_support(self) -> Tuple[float, float]:
    return (min(self.a1, self.a2), max(self.a1, self.a2))

  def scaled(self, factor: complex) -> 'DeltaPairParams':
    return self.model_copy(update={'z1': self.z1 * factor, 'z2': self.z2 * factor})

  def impulses(self) -> List[Tuple[float, complex]]:
    """(position, strength) pairs ordered by position; ties keep a1 first."""
    return sorted([(self.a1, self.z1), (self.a2, self.z2)], key=lambda p: p[0])

  def fourier1(self, q):
    q = np.asarray(q, dtype=float)
    return self.z1 * np.exp(-1j * q * self.a1) + self.z2 * np.exp(-1j * q * self.a2)

  def fourier2(self, q1, q2):
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    value = np.zeros(np.broadcast(q1, q2).shape, dtype=complex)
    if self.a1 > self.a2:
      value = value + np.exp(-1j * (q1 * self.a2 + q2 * self.a1))
    elif self.a2 > self.a1:
      value = value + np.exp(-1j * (q1 * self.a1 + q2 * self.a2))
    return self.z1 * self.z2 * value


class ExponentialSumParams(FamilyParams):
  """z * sum_j c_j e^{i j K x} on [x0, x0 + L]; closed forms for both transforms."""

  def terms(self) -> Tuple[np.ndarray, np.ndarray]:
    """(internal wavenumbers, amplitudes) of the sum."""
    table = self.coefficient_table()
    harmonics = np.array(sorted(table), dtype=float)
    amplitudes = np.array([table[int(j)] for j in harmonics], dtype=complex)
    return harmonics * self.harmonic_unit(), amplitudes

  def coefficient_table(self) -> Dict[int, complex]:
    """Nonzero Fourier coefficients c_j of f in units of harmonic_unit()."""
    raise NotImplementedError

  def harmonic_unit(self) -> float:
    return 0.0

  @property
  def x0(self) -> float:
    return 0.0

  def natural_support(self) -> Tuple[float, float]:
    return (self.x0, self.x0 + self.L)

  def length_scale(self) -> float:
    unit = abs(self.harmonic_unit())
    top = max((abs(j) for j in self.coefficient_table()), default=0)
    scale = self.L
    if unit > 0 and top > 0:
      scale = min(scale, math.pi / (unit * top))
    return scale

  def oscillation(self) -> float:
    kappa, _ = self.terms()
    return float(np.max(np.abs(kappa))) if kappa.size else 0.0

  def _inside(self, x: np.ndarray) -> np.ndarray:
    return (x >= self.x0) & (x <= self.x0 + self.L)

  def shape(self, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    kappa, amplitudes = self.terms()
    total = np.tensordot(np.exp(1j * np.multiply.outer(x, kappa)), amplitudes, axes=([-1], [0]))
    return np.where(self._inside(x), self.z * total, 0j)

  def fourier1(self, q):
    q = np.asarray(q, dtype=float)
    kappa, amplitudes = self.terms()
    theta = kappa - q[..., None]
    parts = amplitudes * np.exp(1j * theta * self.x0) * phase_integral(theta, self.L)
    return self.z * parts.sum(axis=-1)

  def fourier2(self, q1, q2):
    q1, q2 = np.broadcast_arrays(np.asarray(q1, dtype=float), np.asarray(q2, dtype=float))
    kappa, amplitudes = self.terms()
    t1 = kappa[None, :] - q1.reshape(-1, 1)
    t2 = kappa[None, :] - q2.reshape(-1, 1)
    shift = np.exp(1j * t1 * self.x0)[:, :, None] * np.exp(1j * t2 * self.x0)[:, None, :]
    pair = np.multiply.outer(amplitudes, amplitudes)[None, :, :]
    kernel = ordered_phase_integral(t1[:, :, None], t2[:, None, :], self.L)
    total = (pair * shift * kernel).sum(axis=(1, 2))
    return (self.z**2 * total).reshape(q1.shape)


class BarrierParams(ExponentialSumParams):
  """z on (x0, x0 + L)."""

  z: Complex
  L: float = Field(gt=0)
  offset: float = Field(0.0, alias='x0')

  @property
  def x0(self) -> float:
    return self.offset

  def coefficient_table(self) -> Dict[int, complex]:
    return {0: 1.0 + 0j}

  def _inside(self, x: np.ndarray) -> np.ndarray:
    return (x > self.x0) & (x < self.x0 + self.L)


class ExponentialParams(ExponentialSumParams):
  """z e^{iKx} on [0, L]."""

  z: Complex = 1.0 + 0j
  K: float = Field(gt=0)
  L: float = Field(gt=0)

  def coefficient_table(self) -> Dict[int, complex]:
    return {1: 1.0 + 0j}

  def harmonic_unit(self) -> float:
    return self.K


class LocallyPeriodicParams(ExponentialSumParams):
  """z f(x) on [0, L] with f = sum_j c_j e^{ijKx}; L is a multiple of the period of f."""

  z: Complex = 1.0 + 0j
  K: float = Field(gt=0)
  L: float = Field(gt=0)
  coefficients: List[Tuple[int, Complex]]
  ell: Optional[float] = None

  @model_validator(mode='after')
  def _check_period(self) -> 'LocallyPeriodicParams':
    if not any(abs(c) > 0 for _, c in self.coefficients):
      raise ValueError('coefficients must contain a nonzero entry')
    period = self.period()
    ratio = self.L / period
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
      raise ValueError(f'L = {self.L} is not an integer multiple of the period {period}')
    return self

  def coefficient_table(self) -> Dict[int, complex]:
    table: Dict[int, complex] = {}
    for j, c in self.coefficients:
      table[int(j)] = table.get(int(j), 0j) + c
    return {j: c for j, c in table.items() if c != 0}

  def harmonic_unit(self) -> float:
    return self.K

  def fundamental_period(self) -> float:
    """Smallest period of f."""
    step = 0
    for j in self.coefficient_table():
      step = math.gcd(step, abs(j))
    return 2 * math.pi / (self.K * step) if step else self.L

  def period(self) -> float:
    """Period used for the support check (explicit ell or the fundamental period)."""
    if self.ell is None:
      return self.fundamental_period()
    if set(self.coefficient_table()) == {0}:
      return self.ell
    ratio = self.ell / self.fundamental_period()
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
      raise ValueError(f'ell = {self.ell} is not a period of f')
    return self.ell


class GeometricSeriesParams(ExponentialSumParams):
  """z f(x) on [0, L] with f = sum_{j>=1} [a^j e^{2ijKx} + b^j e^{-(2j-1)iKx}]."""

  z: Complex = 1.0 + 0j
  K: float = Field(gt=0)
  L: float = Field(gt=0)
  a: Complex
  b: Complex
  terms_cutoff: float = 1e-17

  @field_validator('a', 'b')
  @classmethod
  def _inside_unit_disk(cls, value: complex) -> complex:
    if not 0 < abs(value) < 1:
      raise ValueError('geometric ratios must satisfy 0 < |r| < 1')
    return value

  def coefficient_table(self) -> Dict[int, complex]:
    table: Dict[int, complex] = {}
    for ratio, harmonic in ((self.a, lambda j: 2 * j), (self.b, lambda j: -(2 * j - 1))):
      count = max(1, int(math.ceil(math.log(self.terms_cutoff) / math.log(abs(ratio)))))
      for j in range(1, count + 1):
        table[harmonic(j)] = ratio**j
    return table

  def harmonic_unit(self) -> float:
    return self.K

  def length_scale(self) -> float:
    return min(self.L, math.pi / (4 * self.K))

  def fundamental_period(self) -> float:
    return 2 * math.pi / self.K

  def period(self) -> float:
    return self.fundamental_period()

  def shape(self, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    even = self.a * np.exp(2j * self.K * x)
    odd = self.b * np.exp(-1j * self.K * x)
    f = even / (1 - even) + odd / (1 - self.b * np.exp(-2j * self.K * x))
    return np.where(self._inside(x), self.z * f, 0j)


class _InfiniteParams(FamilyParams):
  infinite: ClassVar[bool] = True

  truncation_radius: Optional[float] = None

  def _center(self) -> float:
    return 0.0

  def natural_support(self) -> Tuple[float, float]:
    return (-math.inf, math.inf)

  def window(self) -> Tuple[float, float]:
    radius = self.truncation_radius
    if radius is None:
      radius = get_settings().quadrature.truncation_radius * self.L
    return (self._center() - radius, self._center() + radius)

  def breakpoints(self) -> List[float]:
    return []

  def length_scale(self) -> float:
    return self.L / 2


class GaussianPlainParams(_InfiniteParams):
  """z e^{-((x - a)/L)^2}."""

  z: Complex
  L: float = Field(gt=0)
  a: float = 0.0

  def _center(self) -> float:
    return self.a

  def shape(self, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return self.z * np.exp(-(((x - self.a) / self.L) ** 2))

  def fourier1(self, q):
    q = np.asarray(q, dtype=float)
    return (
      self.z * math.sqrt(math.pi) * self.L * np.exp(-1j * q * self.a - (q * self.L) ** 2 / 4)
    )


class GaussianDerivativeParams(GaussianPlainParams):
  """z d/dx e^{-((x - a)/L)^2} = -2 z (x - a)/L^2 e^{-((x - a)/L)^2}."""

  def shape(self, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = (x - self.a) / self.L
    return -2 * self.z * u / self.L * np.exp(-(u**2))

  def fourier1(self, q):
    return 1j * np.asarray(q, dtype=float) * super().fourier1(q)


class InfiniteRangeParams(_InfiniteParams):
  """z/(sqrt(pi) K^2 L^7) e^{-2iKx} e^{-x^2/L^2} [2x^3 - 3L^2 x + iKL^2(2x^2 - L^2)]."""

  z: Complex
  K: float = Field(gt=0)
  L: float = Field(gt=0)

  def oscillation(self) -> float:
    return 2 * self.K

  def shape(self, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    K, L = self.K, self.L
    prefactor = self.z / (math.sqrt(math.pi) * K**2 * L**7)
    poly = 2 * x**3 - 3 * L**2 * x + 1j * K * L**2 * (2 * x**2 - L**2)
    return prefactor * np.exp(-2j * K * x - (x / L) ** 2) * poly

  def fourier1(self, q):
    q = np.asarray(q, dtype=float)
    return 1j * q * self.z * (1 + q / (2 * self.K)) ** 2 * np.exp(
      -((self.L * (self.K + q / 2)) ** 2)
    )


class SampledGridParams(FamilyParams):
  """Piecewise-linear interpolation of complex samples, zero outside the grid."""

  x: List[float]
  values: List[Complex]

  @model_validator(mode='after')
  def _check_grid(self) -> 'SampledGridParams':
    if len(self.x) != len(self.values) or len(self.x) < 2:
      raise ValueError('x and values must have the same length (at least 2)')
    if np.any(np.diff(self.x) <= 0):
      raise ValueError('x must be strictly increasing')
    return self

  def natural_support(self) -> Tuple[float, float]:
    return (self.x[0], self.x[-1])

  def breakpoints(self) -> List[float]:
    return list(self.x)

  def scaled(self, factor: complex) -> 'SampledGridParams':
    return self.model_copy(update={'values': [v * factor for v in self.values]})

  def shape(self, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    values = np.asarray(self.values, dtype=complex)
    re = np.interp(x, self.x, values.real, left=0.0, right=0.0)
    im = np.interp(x, self.x, values.imag, left=0.0, right=0.0)
    return re + 1j * im


_PARAMS: Dict[Family, type] = {
  Family.DELTA_PAIR: DeltaPairParams,
  Family.RECTANGULAR_BARRIER: BarrierParams,
  Family.TRUNCATED_EXPONENTIAL: ExponentialParams,
  Family.LOCALLY_PERIODIC_FOURIER: LocallyPeriodicParams,
  Family.GAUSSIAN_DERIVATIVE: GaussianDerivativeParams,
  Family.GAUSSIAN_PLAIN: GaussianPlainParams,
  Family.GEOMETRIC_SERIES_PERIODIC: GeometricSeriesParams,
  Family.INFINITE_RANGE_ANALYTIC: InfiniteRangeParams,
  Family.SAMPLED_GRID: SampledGridParams,
}

COEFFICIENT_FAMILIES = (
  Family.TRUNCATED_EXPONENTIAL,
  Family.LOCALLY_PERIODIC_FOURIER,
  Family.GEOMETRIC_SERIES_PERIODIC,
)


class PotentialSpec(BaseModel):
  """Declarative description of v(x; k)."""

  model_config = ConfigDict(frozen=True)

  family: Family
  params: SerializeAsAny[FamilyParams]
  support: Optional[Union[Tuple[float, float], Literal['infinite']]] = None
  coupling: Coupling = Field(default_factory=Coupling)

  @model_validator(mode='before')
  @classmethod
  def _typed_params(cls, data: Any) -> Any:
    if isinstance(data, dict) and isinstance(data.get('params'), dict):
      family = Family(data['family'])
      data = {**data, 'params': _PARAMS[family].model_validate(data['params'])}
    return data

  @model_validator(mode='after')
  def _check_support(self) -> 'PotentialSpec':
    if not isinstance(self.params, _PARAMS[self.family]):
      raise ValueError(f'params do not belong to family {self.family.value}')
    natural = self.params.natural_support()
    if self.support is None:
      return self
    if self.support == 'infinite':
      if not self.params.infinite:
        raise ValueError('support "infinite" given for a finite-range family')
      return self
    if self.params.infinite:
      raise ValueError('infinite-range family needs support "infinite"')
    scale = max(1.0, abs(natural[0]), abs(natural[1]))
    if any(abs(s - n) > 1e-9 * scale for s, n in zip(self.support, natural)):
      raise ValueError(f'support {list(self.support)} does not match parameters {list(natural)}')
    return self

  @property
  def distributional(self) -> bool:
    return self.params.distributional

  def window(self) -> Tuple[float, float]:
    """Finite integration window (support, or truncation window)."""
    return self.params.window()

  def to_json(self) -> Dict[str, Any]:
    """Spec-file representation."""
    support = self.support
    if support is None:
      support = 'infinite' if self.params.infinite else list(self.params.natural_support())
    return {
      'family': self.family.value,
      'params': self.params.model_dump(mode='json', by_alias=True),
      'support': support if isinstance(support, str) else list(support),
      'coupling': self.coupling.to_json(),
    }


@dataclass(frozen=True)
class FourierData:
  """Single and ordered double transforms of a spec at a fixed wavenumber."""

  single: Callable[[float], complex]
  double: Callable[[float, float], complex]
  analytic_flag: bool


def make_spec(family: Union[Family, str], coupling: Any = None, **params: Any) -> PotentialSpec:
  """Build a spec from keyword parameters."""
  data: Dict[str, Any] = {'family': Family(family), 'params': params}
  if coupling is not None:
    data['coupling'] = coupling
  return PotentialSpec.model_validate(data)


def load_spec(path: Union[str, Path]) -> PotentialSpec:
  """Read a JSON potential spec file."""
  with open(path, 'r') as f:
    return PotentialSpec.model_validate(json.load(f))


def dump_spec(spec: PotentialSpec, path: Union[str, Path]) -> None:
  """Write a JSON potential spec file."""
  with open(path, 'w') as f:
    json.dump(spec.to_json(), f, indent=2)
    f.write('\n')


def scale_coupling(spec: PotentialSpec, factor: complex) -> PotentialSpec:
  """Copy of spec with every coupling constant multiplied by factor."""
  return spec.model_copy(update={'params': spec.params.scaled(factor)})


def _check_k(k: Optional[float]) -> None:
  if k is not None and not k > 0:
    raise InvalidWavenumber(f'wavenumber must be positive, got {k}')


def evaluate(spec: PotentialSpec, x, k: float):
  """v(x; k), honoring the coupling law.

  Raises:
      DistributionalPotential: for delta families
      InvalidWavenumber: for k <= 0
  """
  if not k > 0:
    raise InvalidWavenumber(f'wavenumber must be positive, got {k}')
  if spec.distributional:
    raise DistributionalPotential('delta potentials have no pointwise values')
  value = spec.coupling.factor(k) * spec.params.shape(np.asarray(x, dtype=float))
  return complex(value) if np.ndim(value) == 0 else value


def integration_window(spec: PotentialSpec, k: Optional[float]) -> Tuple[float, float]:
  """Finite interval outside which v vanishes (or is negligible)."""
  lo, hi = spec.window()
  if spec.params.infinite:
    settings = get_settings().quadrature
    grid = np.linspace(lo, hi, 2001)
    magnitude = np.abs(spec.params.shape(grid))
    peak = magnitude.max()
    edge = max(magnitude[0], magnitude[-1])
    if peak > 0 and edge > settings.truncation_threshold * peak:
      warnings.warn(
        f'{spec.family.value} truncated at [{lo}, {hi}] with tail {edge / peak:.2e} of peak',
        TruncationWarning,
        stacklevel=3,
      )
  return lo, hi


def fourier1(spec: PotentialSpec, q, k: Optional[float] = None, tol: Optional[float] = None):
  """Single Fourier transform v~(q) = integral of e^{-iqx} v(x; k) dx.

  Args:
      spec: Potential
      q: Real transform variable (scalar or array)
      k: Wavenumber, required for k_squared coupling
      tol: Absolute quadrature tolerance for families without a closed form

  Returns:
      Complex value (or array)
  """
  _check_k(k)
  factor = spec.coupling.factor(k)
  closed = spec.params.fourier1(q)
  if closed is not None:
    closed = factor * np.asarray(closed)
    return complex(closed) if closed.ndim == 0 else closed
  lo, hi = integration_window(spec, k)
  params = spec.params
  q_array = np.atleast_1d(np.asarray(q, dtype=float))
  values = np.array(
    [
      integrate(
        lambda x, qq=qq: np.exp(-1j * qq * x) * params.shape(x),
        lo,
        hi,
        q_max=abs(qq) + params.oscillation(),
        breakpoints=params.breakpoints(),
        max_width=params.length_scale(),
        tol=tol,
      )
      for qq in q_array
    ]
  )
  values = factor * values
  return complex(values[0]) if np.ndim(q) == 0 else values.reshape(np.shape(q))


def fourier2(
  spec: PotentialSpec, q1: float, q2: float, k: Optional[float] = None, tol: Optional[float] = None
) -> complex:
  """Ordered double transform: integral over x1 < x2 of e^{-i(q1x1+q2x2)} v(x1) v(x2)."""
  _check_k(k)
  factor = spec.coupling.factor(k)
  closed = spec.params.fourier2(q1, q2)
  if closed is not None:
    return complex(factor**2 * np.asarray(closed))
  lo, hi = integration_window(spec, k)
  params = spec.params
  value = integrate_ordered(
    lambda x: np.exp(-1j * q1 * x) * params.shape(x),
    lambda x: np.exp(-1j * q2 * x) * params.shape(x),
    lo,
    hi,
    q_max=max(abs(q1), abs(q2)) + params.oscillation(),
    breakpoints=params.breakpoints(),
    max_width=params.length_scale(),
    tol=tol,
  )
  return factor**2 * value


def fourier_data(spec: PotentialSpec, k: Optional[float] = None) -> FourierData:
  """Bundle both transforms of spec at wavenumber k."""
  analytic = spec.params.fourier2(0.0, 0.0) is not None
  return FourierData(
    single=lambda q: fourier1(spec, q, k),
    double=lambda q1, q2: fourier2(spec, q1, q2, k),
    analytic_flag=analytic,
  )


def _coefficient_params(spec: PotentialSpec) -> ExponentialSumParams:
  if spec.family not in COEFFICIENT_FAMILIES:
    raise NotPeriodic(f'{spec.family.value} is not a locally periodic family')
  return spec.params


def fourier_coefficients(
  spec: PotentialSpec, n: int, k: Optional[float] = None, numeric: bool = False
) -> Tuple[complex, complex]:
  """Fourier coefficients on one period 2 pi/K.

  c_n are the coefficients of f (f = sum c_n e^{inKx}); a_n is the integral
  of e^{-inKx} v(x) over [0, 2 pi/K], so a_n = z (2 pi/K) c_n.

  Args:
      spec: A locally periodic family
      n: Harmonic index
      k: Wavenumber (k_squared coupling)
      numeric: Compute a_n by quadrature instead of from the coefficient table

  Raises:
      NotPeriodic: for families without a Fourier coefficient table
      PeriodMismatch: when the support is shorter than one period
  """
  params = _coefficient_params(spec)
  period = 2 * math.pi / params.harmonic_unit()
  if params.L < period * (1 - 1e-12):
    raise PeriodMismatch(f'support length {params.L} is shorter than the period {period}')
  z = params.z * spec.coupling.factor(k)
  if numeric:
    unit = params.harmonic_unit()
    a_n = spec.coupling.factor(k) * integrate(
      lambda x: np.exp(-1j * n * unit * x) * params.shape(x),
      0.0,
      period,
      q_max=abs(n * unit) + params.oscillation(),
      max_width=params.length_scale(),
    )
    c_n = a_n / (z * period) if z != 0 else 0j
    return complex(c_n), complex(a_n)
  c_n = params.coefficient_table().get(int(n), 0j)
  return complex(c_n), complex(z * period * c_n)


def reflect(spec: PotentialSpec) -> PotentialSpec:
  """Mirror image v(x) -> v(x0 + L - (x - x0)) about the centre of the support.

  Coefficient families come back as locally periodic specs with
  c'_{-j} = c_j e^{ijKL}.
  """
  params = spec.params
  if spec.family == Family.RECTANGULAR_BARRIER:
    return spec
  if spec.family in (Family.GAUSSIAN_PLAIN, Family.GAUSSIAN_DERIVATIVE):
    sign = -1 if spec.family == Family.GAUSSIAN_DERIVATIVE else 1
    mirrored = params.model_copy(update={'a': -params.a, 'z': sign * params.z})
    return spec.model_copy(update={'params': mirrored})
  if spec.family not in COEFFICIENT_FAMILIES:
    raise UnsupportedFamily(f'reflection is not available for {spec.family.value}')
  unit = params.harmonic_unit()
  mirrored = [
    (-j, complex(c * np.exp(1j * j * unit * params.L)))
    for j, c in sorted(params.coefficient_table().items())
  ]
  return PotentialSpec(
    family=Family.LOCALLY_PERIODIC_FOURIER,
    params=LocallyPeriodicParams(z=params.z, K=unit, L=params.L, coefficients=mirrored),
    coupling=spec.coupling,
  )


def first_order_periodic_amplitudes(
  spec: PotentialSpec, k: float
) -> Tuple[complex, complex, complex]:
  """First-order (linear in z) R^l, R^r, T of a locally periodic potential.

  Resonance sums over the coefficient table; 2k = -/+ jK terms take their
  analytic limits through phase_integral.
  """
  _check_k(k)
  params = _coefficient_params(spec)
  z = params.z * spec.coupling.factor(k)
  kappa, c = params.terms()
  r_left = -1j * z / (2 * k) * np.sum(c * phase_integral(kappa + 2 * k, params.L))
  r_right = -1j * z / (2 * k) * np.sum(c * phase_integral(kappa - 2 * k, params.L))
  t = 1 - 1j * z / (2 * k) * np.sum(c * phase_integral(kappa, params.L))
  return complex(r_left), complex(r_right), complex(t)


def refractive_index(spec: PotentialSpec, x, k: float):
  """Complex refractive index sqrt(1 - v/k^2) on the principal branch."""
  value = principal_sqrt(1 - np.asarray(evaluate(spec, x, k)) / k**2)
  return complex(value) if value.ndim == 0 else value
