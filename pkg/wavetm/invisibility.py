"""Spectral scans, the locally periodic invisibility classifier and its verifier.

For v = z f(x) on [0, L] with f of period l, the first-order reflection
amplitudes at k = pi j/l are proportional to the period coefficients
a_{+j} (left) and a_{-j} (right), and the first-order change of T to a_0,
whenever L is a whole number of periods. A vanishing a_{-j} with a_j != 0
therefore predicts left reflectionlessness at that k, mirrored for right.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from wavetm.born_series import amplitudes_first_order, amplitudes_second_order, born_sum
from wavetm.config import get_settings
from wavetm.errors import (
  DegenerateDenominator,
  InputError,
  InvalidWavenumber,
  NotPeriodic,
  SpectralSingularity,
)
from wavetm.logging_config import get_logger
from wavetm.potential_model import COEFFICIENT_FAMILIES, PotentialSpec, scale_coupling
from wavetm.transfer_exact import (
  ScatteringAmplitudes,
  amplitudes_from_transfer,
  transfer_matrix_ode,
)

logger = get_logger(__name__)

METHODS = ('exact', 'born1', 'born2', 'bornN')

SCAN_COLUMNS = ['k', 'abs_Rl', 'abs_Rr', 'abs_Tm1', 'method', 'flags']


def compute_amplitudes(
  spec: PotentialSpec,
  k: float,
  method: str = 'exact',
  order: Optional[int] = None,
  tol: Optional[float] = None,
) -> ScatteringAmplitudes:
  """Amplitudes from the exact evolution or from a Born approximation.

  Args:
      spec: Potential
      k: Wavenumber
      method: exact (alias ode), born1, born2 or bornN
      order: Series order for bornN
      tol: Integrator tolerance
  """
  if method in ('exact', 'ode'):
    return amplitudes_from_transfer(transfer_matrix_ode(spec, k, tol))
  if method == 'born1':
    return amplitudes_first_order(spec, k)
  if method == 'born2':
    return amplitudes_second_order(spec, k)
  if method == 'bornN':
    if order is None:
      raise InputError('bornN needs an order', 'order')
    return amplitudes_from_transfer(born_sum(spec, k, order, tol).matrix)
  raise InputError(f'unknown method {method!r}', 'method')


class ScanRow(BaseModel):
  """Magnitudes at one wavenumber."""

  model_config = ConfigDict(frozen=True)

  k: float
  abs_rl: float
  abs_rr: float
  abs_tm1: float
  method: str
  flags: str = ''


class SpectralScan(BaseModel):
  """|R^l|, |R^r| and |T - 1| over a wavenumber grid."""

  model_config = ConfigDict(frozen=True)

  spec: PotentialSpec
  method: str
  rows: List[ScanRow]

  def to_frame(self) -> pd.DataFrame:
    """Rows as a DataFrame with the CSV column names."""
    return pd.DataFrame(
      [[r.k, r.abs_rl, r.abs_rr, r.abs_tm1, r.method, r.flags] for r in self.rows],
      columns=SCAN_COLUMNS,
    )

  def column(self, name: str) -> np.ndarray:
    """One magnitude column (abs_rl, abs_rr or abs_tm1) as an array."""
    return np.array([getattr(r, name) for r in self.rows])

  @property
  def k(self) -> np.ndarray:
    """Wavenumbers of the rows."""
    return np.array([r.k for r in self.rows])


def default_k_grid(spec: PotentialSpec, points: Optional[int] = None) -> np.ndarray:
  """Uniform grid over the configured range of k/K for coefficient families."""
  settings = get_settings().invisibility
  if spec.family not in COEFFICIENT_FAMILIES:
    raise NotPeriodic('default grids need a harmonic wavenumber K')
  unit = spec.params.harmonic_unit()
  count = points or settings.scan_points
  return unit * np.linspace(settings.scan_k_over_K_min, settings.scan_k_over_K_max, count)


def _row(spec: PotentialSpec, k: float, method: str, order: Optional[int], tol) -> ScanRow:
  label = f'born{order}' if method == 'bornN' else method
  try:
    amplitudes = compute_amplitudes(spec, k, method, order, tol)
  except SpectralSingularity:
    nan = float('nan')
    return ScanRow(k=k, abs_rl=nan, abs_rr=nan, abs_tm1=nan, method=label, flags='singular')
  except DegenerateDenominator:
    nan = float('nan')
    return ScanRow(k=k, abs_rl=nan, abs_rr=nan, abs_tm1=nan, method=label, flags='degenerate')
  return ScanRow(
    k=k,
    abs_rl=abs(amplitudes.r_left),
    abs_rr=abs(amplitudes.r_right),
    abs_tm1=abs(amplitudes.t - 1),
    method=label,
  )


def scan(
  spec: PotentialSpec,
  k_grid: Iterable[float],
  method: str = 'exact',
  order: Optional[int] = None,
  tol: Optional[float] = None,
  threads: Optional[int] = None,
) -> SpectralScan:
  """Amplitude magnitudes over a k grid.

  Spectral singularities and degenerate perturbative denominators become
  flagged rows. Rows come back sorted by k whatever the worker count.
  """
  if method not in METHODS and method != 'ode':
    raise InputError(f'unknown method {method!r}', 'method')
  grid = sorted(float(k) for k in k_grid)
  if not grid:
    raise InputError('empty k grid', 'k_grid')
  if any(not (math.isfinite(k) and k > 0) for k in grid):
    raise InvalidWavenumber('scan wavenumbers must be positive and finite')
  workers = threads or get_settings().threads
  with ThreadPoolExecutor(max_workers=workers) as pool:
    rows = list(pool.map(lambda k: _row(spec, k, method, order, tol), grid))
  flagged = sum(1 for r in rows if r.flags)
  if flagged:
    logger.info('%d of %d scan rows flagged', flagged, len(rows))
  return SpectralScan(spec=spec, method=method, rows=rows)


class InvisibilityPrediction(BaseModel):
  """Predicted one-sided reflectionlessness at k = pi j/l."""

  model_config = ConfigDict(frozen=True)

  k_value: float
  wavelength: float
  direction: Literal['left', 'right']
  grade: Literal['reflectionless', 'invisible']
  m: float
  j: int
  period: float
  provenance: Dict[str, str] = Field(default_factory=dict)


def _period(spec: PotentialSpec) -> float:
  params = spec.params
  explicit = getattr(params, 'ell', None)
  if explicit is not None:
    return explicit
  step = 0
  for j in params.coefficient_table():
    step = math.gcd(step, abs(j))
  if step == 0:
    # constant f: the whole support is one period
    return params.L
  return 2 * math.pi / (params.harmonic_unit() * step)


def _period_coefficients(spec: PotentialSpec, period: float, j_max: int) -> Dict[int, complex]:
  # a_n on [0, l] is proportional to c_{n * 2 pi/(K l)} when that is an integer
  params = spec.params
  table = params.coefficient_table()
  ratio = 2 * math.pi / (params.harmonic_unit() * period)
  coefficients = {}
  for n in range(-j_max, j_max + 1):
    harmonic = n * ratio
    index = round(harmonic)
    coefficients[n] = table.get(index, 0j) if abs(harmonic - index) < 1e-9 else 0j
  return coefficients


def classify_theorem2(
  spec: PotentialSpec,
  j_max: Optional[int] = None,
  strict: bool = False,
  eps: Optional[float] = None,
) -> List[InvisibilityPrediction]:
  """Predict unidirectional reflectionlessness/invisibility of a locally periodic potential.

  Args:
      spec: A coefficient family
      j_max: Largest harmonic examined
      strict: Require L = 2 m l (an even number of periods) instead of any multiple
      eps: Relative threshold for treating a period coefficient as zero

  Returns:
      Predictions ordered by k; empty (with a logged reason) when the support
      is not a whole number of periods

  Raises:
      NotPeriodic: for families without a coefficient table
  """
  if spec.family not in COEFFICIENT_FAMILIES:
    raise NotPeriodic(f'{spec.family.value} is not a locally periodic family')
  settings = get_settings().invisibility
  j_max = settings.j_max if j_max is None else j_max
  eps = settings.eps_a_analytic if eps is None else eps
  period = _period(spec)
  length = spec.params.L
  periods = length / period
  count = round(periods)
  if count < 1 or abs(periods - count) > 1e-9 * max(1.0, periods):
    logger.info('no predictions: L=%g is not a multiple of the period %g', length, period)
    return []
  if strict and count % 2:
    logger.info('no predictions: L=%g is an odd number (%d) of periods', length, count)
    return []
  a = _period_coefficients(spec, period, j_max)
  threshold = eps * max(abs(v) for v in a.values())
  zero = {n: abs(v) <= threshold for n, v in a.items()}
  grade = 'invisible' if zero[0] else 'reflectionless'
  predictions = []
  for j in range(1, j_max + 1):
    if zero[-j] and not zero[j]:
      direction = 'left'
    elif zero[j] and not zero[-j]:
      direction = 'right'
    else:
      continue
    predictions.append(
      InvisibilityPrediction(
        k_value=math.pi * j / period,
        wavelength=2 * period / j,
        direction=direction,
        grade=grade,
        m=count / 2,
        j=j,
        period=period,
        provenance={
          'condition': f'a_{-j}=0!=a_{j}' if direction == 'left' else f'a_{j}=0!=a_{-j}',
          'a0': 'zero' if zero[0] else 'nonzero',
          'support': f'L={count} periods',
          'mode': 'strict' if strict else 'relaxed',
        },
      )
    )
  return predictions


class VerificationReport(BaseModel):
  """Measured coupling exponents at a predicted wavenumber."""

  model_config = ConfigDict(frozen=True)

  prediction: InvisibilityPrediction
  method: str
  exponents: Dict[str, float]
  magnitudes: Dict[str, float]
  passed: bool
  detail: str = ''


def scaling_exponent(values: List[complex]) -> float:
  """Exponent p of |X| ~ z^p from values at z, z/2, z/4, ...

  Values that vanish identically give inf.
  """
  values = [abs(v) for v in values]
  if all(v == 0 for v in values):
    return float('inf')
  if any(v == 0 for v in values):
    return float('inf') if values[0] > 0 and values[-1] == 0 else float('nan')
  logs = np.log2(values)
  if len(values) == 2:
    return float(logs[0] - logs[1])
  steps = -np.arange(len(values), dtype=float)
  return float(np.polyfit(steps, logs, 1)[0])


def verify_prediction(
  spec: PotentialSpec,
  prediction: InvisibilityPrediction,
  method: str = 'exact',
  order: Optional[int] = None,
  points: int = 2,
  min_exponent: Optional[float] = None,
  linear_window: Optional[float] = None,
) -> VerificationReport:
  """Check a prediction by halving the coupling.

  The suppressed reflection (and |T - 1| for invisible grades) must scale
  at least as z^min_exponent while the opposite reflection stays linear.
  """
  settings = get_settings().invisibility
  min_exponent = settings.suppressed_min_exponent if min_exponent is None else min_exponent
  linear_window = settings.linear_exponent_window if linear_window is None else linear_window
  k = prediction.k_value
  samples = [
    compute_amplitudes(scale_coupling(spec, 0.5**i), k, method, order) for i in range(points)
  ]
  series = {
    'Rl': [s.r_left for s in samples],
    'Rr': [s.r_right for s in samples],
    'Tm1': [s.t - 1 for s in samples],
  }
  exponents = {name: scaling_exponent(values) for name, values in series.items()}
  magnitudes = {name: float(abs(values[0])) for name, values in series.items()}
  suppressed, opposite = ('Rl', 'Rr') if prediction.direction == 'left' else ('Rr', 'Rl')
  failures = []
  if not exponents[suppressed] >= min_exponent:
    failures.append(f'{suppressed} exponent {exponents[suppressed]:.3g} < {min_exponent}')
  if magnitudes[opposite] > 0 and not abs(exponents[opposite] - 1) <= linear_window:
    failures.append(f'{opposite} exponent {exponents[opposite]:.3g} is not linear')
  if prediction.grade == 'invisible' and not exponents['Tm1'] >= min_exponent:
    failures.append(f'T-1 exponent {exponents["Tm1"]:.3g} < {min_exponent}')
  return VerificationReport(
    prediction=prediction,
    method=method,
    exponents=exponents,
    magnitudes=magnitudes,
    passed=not failures,
    detail='; '.join(failures),
  )
