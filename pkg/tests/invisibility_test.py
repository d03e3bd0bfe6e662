import math

import numpy as np
import pytest

from wavetm.errors import InputError, InvalidWavenumber, NotPeriodic
from wavetm.invisibility import (
  SCAN_COLUMNS,
  classify_theorem2,
  compute_amplitudes,
  default_k_grid,
  scan,
  scaling_exponent,
  verify_prediction,
)
from wavetm.potential_model import Family, make_spec, reflect, scale_coupling


def test_compute_amplitudes_of_zero_potential(specs) -> None:
  amplitudes = compute_amplitudes(specs['zero'], 1.3)
  assert amplitudes.t == pytest.approx(1)
  assert abs(amplitudes.r_left) < 1e-14 and abs(amplitudes.r_right) < 1e-14


def test_compute_amplitudes_methods(specs) -> None:
  spec = specs['barrier']
  exact = compute_amplitudes(spec, 4.0, 'ode')
  series = compute_amplitudes(spec, 4.0, 'bornN', order=10)
  assert series.r_right == pytest.approx(exact.r_right, abs=1e-8)
  assert compute_amplitudes(spec, 4.0, 'born2').order == 'born2'
  with pytest.raises(InputError):
    compute_amplitudes(spec, 4.0, 'bornN')
  with pytest.raises(InputError):
    compute_amplitudes(spec, 4.0, 'wkb')


def test_scan_sorts_rows_and_matches_threads(specs) -> None:
  spec = specs['barrier']
  grid = [3.0, 0.5, 2.0, 1.0]
  single = scan(spec, grid, threads=1)
  pooled = scan(spec, grid, threads=3)
  np.testing.assert_allclose(single.k, [0.5, 1.0, 2.0, 3.0])
  np.testing.assert_allclose(pooled.column('abs_rl'), single.column('abs_rl'))
  frame = single.to_frame()
  assert list(frame.columns) == SCAN_COLUMNS
  assert (frame['method'] == 'exact').all()
  assert not frame['flags'].any()


def test_scan_flags_spectral_singularity() -> None:
  spec = make_spec(Family.DELTA_PAIR, z1=2j, z2=0.0, a1=0.0, a2=1.0)
  rows = scan(spec, [0.5, 1.0]).rows
  assert rows[1].flags == 'singular'
  assert math.isnan(rows[1].abs_rl)
  assert rows[0].flags == ''


def test_scan_flags_degenerate_denominator() -> None:
  spec = make_spec(Family.RECTANGULAR_BARRIER, z=2j, L=1.0)
  rows = scan(spec, [1.0], method='born1').rows
  assert rows[0].flags == 'degenerate'


def test_scan_labels_series_order(specs) -> None:
  rows = scan(specs['barrier'], [1.0], method='bornN', order=3).rows
  assert rows[0].method == 'born3'


@pytest.mark.parametrize('grid', [[], [1.0, -1.0], [float('inf')]])
def test_scan_rejects_bad_grids(specs, grid) -> None:
  with pytest.raises((InputError, InvalidWavenumber)):
    scan(specs['barrier'], grid)


def test_default_grid(specs) -> None:
  grid = default_k_grid(specs['exponential'], points=10)
  unit = 4 * math.pi
  assert len(grid) == 10
  assert grid[0] == pytest.approx(0.05 * unit)
  assert grid[-1] == pytest.approx(3.5 * unit)
  assert len(default_k_grid(specs['three_harmonic'])) == 1200
  with pytest.raises(NotPeriodic):
    default_k_grid(specs['gaussian'])


def test_three_harmonic_predictions(specs) -> None:
  predictions = classify_theorem2(specs['three_harmonic'])
  assert [(round(p.k_value, 9), p.direction) for p in predictions] == [
    (1.0, 'right'),
    (2.0, 'left'),
    (3.0, 'right'),
  ]
  first = predictions[0]
  assert first.grade == 'invisible'
  assert first.period == pytest.approx(math.pi)
  assert first.m == 2
  assert first.wavelength == pytest.approx(2 * math.pi)
  assert first.provenance['a0'] == 'zero'
  strict = classify_theorem2(specs['three_harmonic'], strict=True)
  assert [p.k_value for p in strict] == [p.k_value for p in predictions]
  assert strict[0].provenance['mode'] == 'strict'


def test_geometric_ladder(specs) -> None:
  spec = specs['geometric']
  predictions = classify_theorem2(spec, j_max=11)
  assert [p.j for p in predictions] == list(range(1, 12))
  for p in predictions:
    assert p.direction == ('left' if p.j % 2 == 0 else 'right')
    assert p.k_value == pytest.approx(p.j / 2)


def test_nonzero_mean_is_reflectionless_only() -> None:
  spec = make_spec(
    Family.LOCALLY_PERIODIC_FOURIER, z=0.1, K=1.0, L=2 * math.pi, coefficients=[[0, 1], [1, 1]]
  )
  predictions = classify_theorem2(spec)
  assert [(p.j, p.direction, p.grade) for p in predictions] == [(1, 'left', 'reflectionless')]
  assert classify_theorem2(spec, strict=True) == []


def test_support_off_the_period_gives_nothing() -> None:
  spec = make_spec(Family.TRUNCATED_EXPONENTIAL, z=0.1, K=2 * math.pi, L=1.5)
  assert classify_theorem2(spec) == []


def test_real_potentials_give_no_predictions(specs) -> None:
  assert classify_theorem2(specs['cosine_real']) == []
  with pytest.raises(NotPeriodic):
    classify_theorem2(specs['gaussian'])


@pytest.mark.parametrize(
  'values, expected',
  [([1.0, 0.25], 2.0), ([1.0, 0.5, 0.25], 1.0), ([8.0, 1.0, 0.125, 1 / 64], 3.0)],
)
def test_scaling_exponent(values, expected) -> None:
  assert scaling_exponent(values) == pytest.approx(expected)


def test_scaling_exponent_with_zeros() -> None:
  assert scaling_exponent([0, 0]) == math.inf
  assert scaling_exponent([1e-3, 0]) == math.inf
  assert math.isnan(scaling_exponent([0, 1e-3]))


def test_verify_three_harmonic_prediction(specs) -> None:
  spec = specs['three_harmonic']
  prediction = classify_theorem2(spec)[0]
  report = verify_prediction(spec, prediction)
  assert report.passed, report.detail
  assert report.exponents['Rr'] >= 1.8
  assert abs(report.exponents['Rl'] - 1) <= 0.3


def test_verify_rejects_wrong_direction(specs) -> None:
  spec = specs['three_harmonic']
  prediction = classify_theorem2(spec)[0].model_copy(update={'direction': 'left'})
  report = verify_prediction(spec, prediction)
  assert not report.passed
  assert 'Rl exponent' in report.detail


@pytest.mark.slow
def test_three_harmonic_full_scan_has_no_flagged_rows(specs) -> None:
  spec = specs['three_harmonic']
  frame = scan(spec, default_k_grid(spec)).to_frame()
  assert len(frame) == 1200
  assert not frame['flags'].any()


def test_constant_periodic_spec_has_no_predictions() -> None:
  spec = make_spec(
    Family.LOCALLY_PERIODIC_FOURIER, z=0.5, K=1.0, L=2 * math.pi, coefficients=[[0, 1]]
  )
  assert classify_theorem2(spec) == []
  amplitudes = compute_amplitudes(spec, 1.0)
  assert np.isfinite(amplitudes.t)


def test_reflection_swaps_predicted_directions(specs) -> None:
  spec = specs['three_harmonic']
  original = classify_theorem2(spec)
  mirrored = classify_theorem2(reflect(spec))
  assert [p.k_value for p in mirrored] == pytest.approx([p.k_value for p in original])
  assert [p.direction for p in original] == ['right', 'left', 'right']
  assert [p.direction for p in mirrored] == ['left', 'right', 'left']
  assert [p.grade for p in mirrored] == [p.grade for p in original]


@pytest.mark.parametrize('factor', [0.5, 1e-3, 4.0, 2j])
def test_predictions_do_not_depend_on_coupling_strength(specs, factor) -> None:
  spec = specs['three_harmonic']
  baseline = [(p.k_value, p.direction, p.grade) for p in classify_theorem2(spec)]
  scaled = classify_theorem2(scale_coupling(spec, factor))
  assert [(p.k_value, p.direction, p.grade) for p in scaled] == baseline


def test_second_order_scan_error_shrinks_cubically(specs) -> None:
  grid = [0.9, 1.7, 2.6]

  def discrepancy(factor: float) -> float:
    spec = scale_coupling(specs['three_harmonic'], factor)
    exact, series = scan(spec, grid), scan(spec, grid, method='born2')
    return max(
      float(np.max(np.abs(exact.column(name) - series.column(name))))
      for name in ('abs_rl', 'abs_rr', 'abs_tm1')
    )

  full, half = discrepancy(0.5), discrepancy(0.25)
  assert scaling_exponent([full, half]) >= 2.9
