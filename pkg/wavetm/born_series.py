"""Dyson (Born) expansion of the transfer matrix.

M = 1 + sum_l M^(l). The terms come from one joint integration of
dA_l/dtau = -i H_I(tau) A_{l-1}, A_0 = 1, A_l(tau_-) = 0, so M^(l) = A_l(tau_+)
and every order costs one extra 2x2 block.
"""

import warnings
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from wavetm.config import get_settings
from wavetm.errors import DegenerateDenominator, InputError, InvalidWavenumber, NonconvergentSeries
from wavetm.logging_config import get_logger
from wavetm.potential_model import PotentialSpec, fourier1, fourier2, fourier_data
from wavetm.transfer_exact import (
  IDENTITY,
  ScatteringAmplitudes,
  TransferMatrix,
  first_order_matrix,
  impulse_matrix,
  propagate,
  second_order_matrix,
)

logger = get_logger(__name__)


class BornTerm(BaseModel):
  """The order-l term M^(l) of the Born series."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  order: int
  matrix: np.ndarray
  k: float


class BornSum(BaseModel):
  """Partial sum 1 + M^(1) + ... + M^(N) with a tail estimate."""

  model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

  matrix: TransferMatrix
  terms: List[BornTerm]
  residual_estimate: Optional[float]
  nonconvergent: bool = False


def _check(k: float, order: int) -> None:
  if not k > 0:
    raise InvalidWavenumber(f'wavenumber must be positive, got {k}')
  if order < 0:
    raise InputError(f'order must be non-negative, got {order}', 'order')


def _impulsive_terms(spec: PotentialSpec, k: float, max_order: int) -> List[np.ndarray]:
  factor = spec.coupling.factor(k)
  (a1, z1), (a2, z2) = spec.params.impulses()
  first = impulse_matrix(a1, factor * z1, k) - IDENTITY
  second = impulse_matrix(a2, factor * z2, k) - IDENTITY
  terms = [first + second, second @ first]
  terms += [np.zeros((2, 2), dtype=complex)] * max(0, max_order - 2)
  return terms[:max_order]


def born_terms(
  spec: PotentialSpec, k: float, max_order: int, tol: Optional[float] = None
) -> List[BornTerm]:
  """Born terms M^(1) ... M^(max_order).

  Args:
      spec: Potential
      k: Wavenumber (> 0)
      max_order: Highest order
      tol: Relative tolerance of the joint integration

  Returns:
      Terms ordered by order
  """
  _check(k, max_order)
  if max_order == 0:
    return []
  if spec.distributional:
    matrices = _impulsive_terms(spec, k, max_order)
  else:

    def rhs(h: np.ndarray, y: np.ndarray) -> np.ndarray:
      blocks = y.reshape(max_order, 2, 2)
      previous = np.concatenate([IDENTITY[None], blocks[:-1]])
      return (-1j * h[None] @ previous).ravel()

    y = propagate(spec, k, rhs, np.zeros(4 * max_order, dtype=complex), tol)
    matrices = list(y.reshape(max_order, 2, 2))
  return [BornTerm(order=i + 1, matrix=m, k=k) for i, m in enumerate(matrices)]


def born_term(spec: PotentialSpec, k: float, order: int, tol: Optional[float] = None) -> BornTerm:
  """Single Born term M^(order)."""
  if order < 1:
    raise InputError(f'order must be at least 1, got {order}', 'order')
  return born_terms(spec, k, order, tol)[-1]


def closed_form_term(spec: PotentialSpec, k: float, order: int) -> BornTerm:
  """M^(1) or M^(2) assembled from the Fourier transforms of the potential."""
  data = fourier_data(spec, k)
  if order == 1:
    matrix = first_order_matrix(data.single, k)
  elif order == 2:
    matrix = second_order_matrix(data.double, k)
  else:
    raise InputError('closed forms exist for orders 1 and 2 only', 'order')
  return BornTerm(order=order, matrix=matrix, k=k)


def born_sum(
  spec: PotentialSpec, k: float, max_order: int, tol: Optional[float] = None
) -> BornSum:
  """Partial Born sum with a geometric tail estimate.

  The estimate is |M^(N)| rho/(1 - rho) with rho = |M^(N)|/|M^(N-1)|
  (spectral norms, M^(0) = 1). rho >= 1 flags the series as nonconvergent
  and emits NonconvergentSeries; the partial sum is still returned.
  """
  terms = born_terms(spec, k, max_order, tol)
  total = IDENTITY + sum((t.matrix for t in terms), np.zeros((2, 2), dtype=complex))
  matrix = TransferMatrix.build(total, k, f'born({max_order})')
  if not terms:
    return BornSum(matrix=matrix, terms=terms, residual_estimate=None)
  norms = [1.0] + [float(np.linalg.norm(t.matrix, 2)) for t in terms]
  last, before = norms[-1], norms[-2]
  if last == 0:
    return BornSum(matrix=matrix, terms=terms, residual_estimate=0.0)
  rho = last / before if before > 0 else float('inf')
  if rho >= 1:
    warnings.warn(
      f'Born series at k={k} is not decreasing (ratio {rho:.3g})', NonconvergentSeries, stacklevel=2
    )
    return BornSum(matrix=matrix, terms=terms, residual_estimate=None, nonconvergent=True)
  return BornSum(matrix=matrix, terms=terms, residual_estimate=last * rho / (1 - rho))


def _denominator_check(value: complex, k: float, what: str) -> None:
  tol = get_settings().spectral.denominator_tol
  if abs(value) <= tol * max(1.0, k * k):
    raise DegenerateDenominator(f'{what} vanishes at k={k}')


def amplitudes_first_order(spec: PotentialSpec, k: float) -> ScatteringAmplitudes:
  """First-order amplitudes R = v(-/+2k)/(2ik - v(0)), T = 2ik/(2ik - v(0)).

  Raises:
      DegenerateDenominator: when 2ik - v(0) vanishes
  """
  _check(k, 1)
  v0 = complex(fourier1(spec, 0.0, k))
  denominator = 2j * k - v0
  _denominator_check(denominator, k, '2ik - v(0)')
  return ScatteringAmplitudes(
    r_left=complex(fourier1(spec, -2 * k, k)) / denominator,
    r_right=complex(fourier1(spec, 2 * k, k)) / denominator,
    t=2j * k / denominator,
    k=k,
    order='born1',
  )


def amplitudes_second_order(spec: PotentialSpec, k: float) -> ScatteringAmplitudes:
  """Second-order amplitudes from single and ordered double transforms.

  Raises:
      DegenerateDenominator: when 4k^2 + 2i v(0) k + v(2k,-2k) - v(0,0) vanishes
  """
  _check(k, 2)
  q = 2 * k
  v0 = complex(fourier1(spec, 0.0, k))
  vp = complex(fourier1(spec, q, k))
  vm = complex(fourier1(spec, -q, k))

  def v2(q1: float, q2: float) -> complex:
    return fourier2(spec, q1, q2, k)

  denominator = 4 * k * k + 2j * v0 * k + v2(q, -q) - v2(0.0, 0.0)
  _denominator_check(denominator, k, 'second-order denominator')
  return ScatteringAmplitudes(
    r_left=(-2j * k * vm + v2(-q, 0.0) - v2(0.0, -q)) / denominator,
    r_right=(-2j * k * vp - v2(q, 0.0) + v2(0.0, q)) / denominator,
    t=4 * k * k / denominator,
    k=k,
    order='born2',
  )
