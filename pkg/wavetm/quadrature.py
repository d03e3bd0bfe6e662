"""Composite Gauss-Legendre quadrature with oscillation-aware panels.

Integrands here are products of smooth (or piecewise smooth) envelopes and
e^{-iqx}. Panels are never wider than pi/max|q|, jumps are panel edges, and a
panel is bisected while two node counts disagree.
"""

from functools import lru_cache
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from wavetm.config import get_settings
from wavetm.errors import QuadratureFailure
from wavetm.logging_config import get_logger

logger = get_logger(__name__)

ComplexFunction = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=16)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
  nodes, weights = np.polynomial.legendre.leggauss(n)
  nodes.setflags(write=False)
  weights.setflags(write=False)
  return nodes, weights


def panel_edges(
  a: float,
  b: float,
  q_max: float = 0.0,
  breakpoints: Iterable[float] = (),
  max_width: Optional[float] = None,
) -> np.ndarray:
  """Lay out panel edges on [a, b].

  Args:
      a: Lower limit
      b: Upper limit
      q_max: Largest oscillation wavenumber in the integrand
      breakpoints: Points where the integrand may jump
      max_width: Upper bound on the panel width (envelope length scale)

  Returns:
      Sorted array of panel edges starting at a and ending at b
  """
  if b <= a:
    return np.array([a, a])
  width = b - a
  if q_max > 0:
    width = min(width, np.pi / q_max)
  if max_width:
    width = min(width, max_width)
  points = sorted({a, b, *(p for p in breakpoints if a < p < b)})
  edges = [points[0]]
  for lo, hi in zip(points[:-1], points[1:]):
    count = max(1, int(np.ceil((hi - lo) / width - 1e-12)))
    edges.extend(np.linspace(lo, hi, count + 1)[1:])
  return np.asarray(edges, dtype=float)


def _panel_sums(f: ComplexFunction, lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
  t, w = _legendre(n)
  half = 0.5 * (hi - lo)
  x = (0.5 * (hi + lo))[:, None] + half[:, None] * t[None, :]
  return (np.asarray(f(x), dtype=complex) * w[None, :]).sum(axis=1) * half


def integrate(
  f: ComplexFunction,
  a: float,
  b: float,
  q_max: float = 0.0,
  breakpoints: Iterable[float] = (),
  max_width: Optional[float] = None,
  tol: Optional[float] = None,
) -> complex:
  """Integrate a vectorized complex function over [a, b].

  Raises:
      QuadratureFailure: when the panel budget is exhausted before reaching tol
  """
  settings = get_settings().quadrature
  tol = settings.tol if tol is None else tol
  n = settings.nodes
  edges = panel_edges(a, b, q_max, breakpoints, max_width)
  if edges[-1] <= edges[0]:
    return 0j
  span = b - a
  while True:
    lo, hi = edges[:-1], edges[1:]
    coarse = _panel_sums(f, lo, hi, n)
    fine = _panel_sums(f, lo, hi, n + n // 2)
    err = np.abs(fine - coarse)
    bad = err > tol * (hi - lo) / span
    if not bad.any():
      return complex(fine.sum())
    if len(edges) > settings.max_panels:
      raise QuadratureFailure('composite quadrature did not converge', float(err.sum()))
    mids = 0.5 * (lo[bad] + hi[bad])
    edges = np.sort(np.concatenate([edges, mids]))


def _ordered_sum(
  f1: ComplexFunction, f2: ComplexFunction, edges: np.ndarray, n: int
) -> complex:
  t, w = _legendre(n)
  lo, hi = edges[:-1], edges[1:]
  half = 0.5 * (hi - lo)
  x2 = (0.5 * (hi + lo))[:, None] + half[:, None] * t[None, :]
  full = (np.asarray(f1(x2), dtype=complex) * w[None, :]).sum(axis=1) * half
  before = np.concatenate([[0j], np.cumsum(full)[:-1]])
  # inner integral from the panel start up to each outer node
  inner_half = 0.5 * (x2 - lo[:, None])
  x1 = lo[:, None, None] + inner_half[:, :, None] * (t[None, None, :] + 1.0)
  partial = (np.asarray(f1(x1), dtype=complex) * w[None, None, :]).sum(axis=2) * inner_half
  outer = np.asarray(f2(x2), dtype=complex) * (before[:, None] + partial)
  return complex(((outer * w[None, :]).sum(axis=1) * half).sum())


def integrate_ordered(
  f1: ComplexFunction,
  f2: ComplexFunction,
  a: float,
  b: float,
  q_max: float = 0.0,
  breakpoints: Iterable[float] = (),
  max_width: Optional[float] = None,
  tol: Optional[float] = None,
) -> complex:
  """Compute the ordered double integral of f2(x2) f1(x1) over a < x1 < x2 < b.

  The inner integral is accumulated panel by panel; the layout is bisected
  until two successive layouts agree within tol.
  """
  settings = get_settings().quadrature
  tol = settings.tol if tol is None else tol
  n = settings.nodes
  edges = panel_edges(a, b, q_max, breakpoints, max_width)
  if edges[-1] <= edges[0]:
    return 0j
  previous = _ordered_sum(f1, f2, edges, n)
  while True:
    edges = np.sort(np.concatenate([edges, 0.5 * (edges[:-1] + edges[1:])]))
    current = _ordered_sum(f1, f2, edges, n)
    residual = abs(current - previous)
    if residual <= tol:
      return current
    if len(edges) > settings.max_panels:
      raise QuadratureFailure('ordered double quadrature did not converge', residual)
    logger.debug('ordered quadrature refining to %d panels (residual %.2e)', len(edges), residual)
    previous = current
