import math

import numpy as np
import pytest
from scipy.special import erf

from wavetm.errors import DegenerateAlphaDenominator, InputError, NonSmoothData
from wavetm.inverse_scattering import (
  FirstBornData,
  data_from_spec,
  inverse_fourier,
  reconstruct,
  registered_data,
  roundtrip_validate,
)
from wavetm.potential_model import Family, evaluate, make_spec

X = np.linspace(-3.0, 3.0, 241)


def gaussian_potential(x: np.ndarray, z: float = 1.0, length: float = 1.0) -> np.ndarray:
  return -2 * z * x * np.exp(-((x / length) ** 2)) / (math.sqrt(math.pi) * length**3)


def test_registered_data_lookup() -> None:
  data = registered_data('barrier_m12', z=2.0)
  assert data.kind == 'M12'
  assert data.x_space is not None
  assert registered_data('two_block_m12').x_space is None
  with pytest.raises(InputError):
    registered_data('nope')
  with pytest.raises(InputError):
    registered_data('gaussian_m12', K=1.0)


def test_first_born_data_validation() -> None:
  k = np.linspace(-4.0, 4.0, 33)
  with pytest.raises(ValueError):
    FirstBornData(kind='M12')
  with pytest.raises(ValueError):
    FirstBornData(kind='M12', function=np.exp, k=k, values=np.ones_like(k))
  with pytest.raises(ValueError):
    FirstBornData(kind='M12', k=k + 1.0, values=np.ones_like(k))
  with pytest.raises(ValueError):
    FirstBornData(kind='M12', k=k[::-1], values=np.ones_like(k))
  with pytest.raises(ValueError):
    FirstBornData(kind='M12', k=k[:4], values=np.ones(4))


def test_fft_transform_matches_closed_form() -> None:
  data = registered_data('gaussian_m12')
  closed = inverse_fourier(data)
  assert closed.closed_form
  numeric = inverse_fourier(data.model_copy(update={'x_space': None}))
  assert not numeric.closed_form and numeric.residue == 0
  y = np.linspace(-6.0, 6.0, 97)
  np.testing.assert_allclose(numeric.at(y), closed.at(y), atol=1e-10)
  np.testing.assert_allclose(numeric.derivative_at(y), closed.derivative_at(y), atol=1e-8)
  assert math.isnan(numeric.at(100.0).real)


def test_pole_at_zero_is_split_off() -> None:
  data = registered_data('gaussian_over_k_m12', z=1.0, L=1.0).model_copy(update={'x_space': None})
  transform = inverse_fourier(data)
  assert transform.residue == pytest.approx(1.0, abs=1e-6)
  y = np.linspace(-6.0, 6.0, 97)
  np.testing.assert_allclose(transform.at(y), 0.5j * erf(y / 2), atol=1e-8)


@pytest.mark.parametrize(
  'name, expected',
  [
    ('gaussian_m12', gaussian_potential(X)),
    ('gaussian_over_k_m12', 2j * np.exp(-(X**2)) / math.sqrt(math.pi)),
  ],
)
def test_offdiagonal_route_recovers_gaussians(name, expected) -> None:
  data = registered_data(name).model_copy(update={'x_space': None})
  result = reconstruct(data, 'm12')
  assert result.route == 'm12' and result.alpha is None
  np.testing.assert_allclose(result.at(X), expected, atol=1e-6)


def test_sum_of_data_sets() -> None:
  single = registered_data('gaussian_m12').model_copy(update={'x_space': None})
  result = reconstruct(single + single, 'm12')
  np.testing.assert_allclose(result.at(X), 2 * gaussian_potential(X), atol=1e-6)
  table = FirstBornData(kind='M12', k=np.linspace(-1, 1, 9), values=np.zeros(9))
  with pytest.raises(InputError):
    single + table


def test_two_blocks_of_opposite_sign() -> None:
  z, length, gap = 0.5, 1.0, 0.5
  result = reconstruct(registered_data('two_block_m12', z=z, L=length, J=gap), 'm12')

  def mean(lo: float, hi: float) -> float:
    return float(np.mean(result.at(np.linspace(lo, hi, 101))).real)

  assert mean(0.1, 0.9) == pytest.approx(-z, abs=0.02 * z)
  assert mean(length + 0.1 * gap, length + 0.9 * gap) == pytest.approx(0, abs=0.02 * z)
  assert mean(length + gap + 0.1, 2 * length + gap - 0.1) == pytest.approx(z, abs=0.02 * z)


def test_tabulated_data() -> None:
  k = np.linspace(-8.0, 8.0, 2049)
  data = FirstBornData(kind='M12', k=k, values=np.exp(-(k**2)) + 0j)
  result = reconstruct(data, 'm12')
  np.testing.assert_allclose(result.at(X), gaussian_potential(X), atol=1e-5)
  assert result.notes and result.notes[0].startswith('taper sensitivity')


def test_rough_table_is_rejected(tmp_path, monkeypatch) -> None:
  path = tmp_path / 'taper.yaml'
  path.write_text('inverse:\n  taper_fraction: 0.3\n')
  monkeypatch.setenv('WAVETM_CONFIG', str(path))
  k = np.linspace(-4.0, 4.0, 513)
  data = FirstBornData(kind='M12', k=k, values=np.ones_like(k, dtype=complex))
  with pytest.raises(NonSmoothData):
    reconstruct(data, 'm12')


@pytest.mark.parametrize('route', ['m12', 'm21'])
def test_gaussian_roundtrip(specs, route) -> None:
  report = roundtrip_validate(specs['gaussian'], route)
  assert report.route == route
  assert report.points > 100
  assert report.sup_error < 1e-5


def test_barrier_roundtrip_away_from_jumps(specs) -> None:
  report = roundtrip_validate(specs['barrier'], 'm12')
  assert report.sup_error <= 1e-3


def test_left_reflection_route_without_mean() -> None:
  source = registered_data('inf_range_rl', z=1.0, K=2.0, L=1.0)
  result = reconstruct(source, 'rl')
  assert result.route == 'rl'
  assert abs(result.alpha) <= 1e-8
  assert any(note.startswith('1 + int R') for note in result.notes)


def test_left_reflection_route_recovers_negated_infinite_range_family(specs) -> None:
  result = reconstruct(registered_data('inf_range_rl', z=1.0, K=2.0, L=1.0), 'rl')
  near = np.abs(result.x) <= 6.0
  x, values = result.x[near], result.values[near]
  negated = specs['inf_range']
  assert negated.params.z == -1.0
  assert np.max(np.abs(values - evaluate(negated, x, 1.0))) <= 1e-6
  plus = make_spec(Family.INFINITE_RANGE_ANALYTIC, z=1.0, K=2.0, L=1.0)
  assert np.max(np.abs(values - evaluate(plus, x, 1.0))) > 0.1
  k = np.array([1.0, 2.0, 3.0])
  forward = data_from_spec(negated, 'R_left').function(k)
  np.testing.assert_allclose(forward, registered_data('inf_range_rl').function(k), atol=1e-8)


@pytest.mark.parametrize('route', ['rr', 'rl'])
def test_barrier_reflection_roundtrip(specs, route) -> None:
  report = roundtrip_validate(specs['barrier'], route)
  assert report.route == route
  assert report.sup_error <= 1e-3
  # alpha is the integral of v: z L = 1
  assert abs(report.alpha - 1.0) <= 1e-6


def test_reflection_route_alpha_vanishes_without_mean(specs) -> None:
  report = roundtrip_validate(specs['gaussian_derivative'], 'rr')
  assert abs(report.alpha) <= 1e-8
  assert report.sup_error < 1e-4


def test_k_squared_coupling_is_noted_on_reconstruction() -> None:
  spec = make_spec(Family.GAUSSIAN_DERIVATIVE, z=0.5, L=1.0, coupling={'k_squared': 0.25})
  data = data_from_spec(spec, 'M12')
  assert data.notes == ['coupling k_squared c=0.25 inverted as v/(c k^2)']
  result = reconstruct(data, 'm12')
  assert result.notes[0] == data.notes[0]
  assert not data_from_spec(make_spec(Family.GAUSSIAN_DERIVATIVE, z=0.5, L=1.0), 'M12').notes


def test_alpha_without_signal_is_degenerate() -> None:
  data = FirstBornData(kind='R_right', function=lambda k: -np.exp(-(k**2)) + 0j)
  with pytest.raises(DegenerateAlphaDenominator):
    reconstruct(data, 'rr')


def test_route_and_kind_must_agree(specs) -> None:
  data = registered_data('gaussian_m12')
  with pytest.raises(InputError):
    reconstruct(data, 'rr')
  with pytest.raises(InputError):
    reconstruct(data, 'xx')
  with pytest.raises(InputError):
    data_from_spec(specs['delta_pair'], 'M12')


def test_forward_data_from_spec(specs) -> None:
  spec = specs['barrier']
  k = np.array([0.5, 1.0, 3.0])
  m12 = data_from_spec(spec, 'M12').function(k)
  np.testing.assert_allclose(m12, (np.exp(-2j * k) - 1) / (4 * k * k), rtol=1e-9)
  k_squared = make_spec(Family.GAUSSIAN_PLAIN, z=1.0, L=1.0, coupling={'k_squared': 0.5})
  plain = data_from_spec(specs['gaussian'], 'R_left').function(k)
  np.testing.assert_allclose(data_from_spec(k_squared, 'R_left').function(k), plain)
  assert evaluate(specs['gaussian'], 0.0, 1.0) == pytest.approx(1.0)
