import numpy as np
import pytest

from wavetm.errors import (
  InvalidWavenumber,
  SpectralSingularity,
  UnsupportedFamily,
  WavenumberMismatch,
)
from wavetm.potential_model import Family, make_spec
from wavetm.transfer_exact import (
  IDENTITY,
  ScatteringAmplitudes,
  TransferMatrix,
  amplitudes_from_transfer,
  analytic_transfer,
  barrier_entries,
  compose,
  impulse_matrix,
  narrow_rectangle_oracle,
  transfer_from_amplitudes,
  transfer_matrix_ode,
)

K_VALUES = [0.5, 1.0, 2.0, 5.0]


def test_zero_potential_gives_identity(specs) -> None:
  m = transfer_matrix_ode(specs['zero'], 1.3)
  np.testing.assert_allclose(m.entries, IDENTITY, atol=1e-15)
  amplitudes = amplitudes_from_transfer(m)
  assert amplitudes.t == pytest.approx(1.0)
  assert amplitudes.r_left == 0 and amplitudes.r_right == 0


@pytest.mark.parametrize(
  'name', ['barrier', 'barrier_complex', 'exponential', 'gaussian', 'three_harmonic']
)
@pytest.mark.parametrize('k', K_VALUES)
def test_unit_determinant(specs, name, k) -> None:
  assert transfer_matrix_ode(specs[name], k).det_residual <= 1e-9


@pytest.mark.parametrize('z', [1.0, 1j, 1 + 1j])
@pytest.mark.parametrize('length', [1.0, 2.0])
def test_ode_matches_barrier_closed_form(z, length) -> None:
  spec = make_spec(Family.RECTANGULAR_BARRIER, z=z, L=length)
  for k in K_VALUES:
    np.testing.assert_allclose(
      transfer_matrix_ode(spec, k).entries, analytic_transfer(spec, k).entries, atol=1e-8
    )


def test_shifted_barrier() -> None:
  spec = make_spec(Family.RECTANGULAR_BARRIER, z=0.7 - 0.3j, L=0.8, x0=-1.1)
  for k in (0.5, 3.0):
    np.testing.assert_allclose(
      transfer_matrix_ode(spec, k).entries, analytic_transfer(spec, k).entries, atol=1e-8
    )


def test_composition_of_barrier_pieces() -> None:
  z, k = 1.0 + 0.5j, 2.0
  whole = analytic_transfer(make_spec(Family.RECTANGULAR_BARRIER, z=z, L=1.0), k)
  left = analytic_transfer(make_spec(Family.RECTANGULAR_BARRIER, z=z, L=0.4), k)
  right = analytic_transfer(make_spec(Family.RECTANGULAR_BARRIER, z=z, L=0.6, x0=0.4), k)
  np.testing.assert_allclose(compose(right, left).entries, whole.entries, atol=1e-12)


def test_compose_rejects_mixed_wavenumbers() -> None:
  a = TransferMatrix.build(IDENTITY, 1.0, 'analytic')
  b = TransferMatrix.build(IDENTITY, 2.0, 'analytic')
  with pytest.raises(WavenumberMismatch):
    compose(a, b)


def test_barrier_near_turning_point_is_continuous() -> None:
  k, length = 1.5, 1.0
  at = barrier_entries(k * k, length, k)
  near = barrier_entries(k * k * (1 + 1e-7), length, k)
  np.testing.assert_allclose(at, near, atol=1e-6)
  assert abs(np.linalg.det(at) - 1) < 1e-12


def test_delta_matrix_is_exact_jump(specs) -> None:
  m = transfer_matrix_ode(specs['delta_pair'], 2.0)
  expected = impulse_matrix(1.0, 1.0, 2.0) @ impulse_matrix(0.0, 1.0, 2.0)
  np.testing.assert_allclose(m.entries, expected)
  assert m.det_residual < 1e-14


@pytest.mark.parametrize('name', ['delta_pair', 'delta_pair_complex'])
def test_delta_pair_matches_narrow_rectangles(specs, name) -> None:
  for k in (0.5, 2.0):
    exact = transfer_matrix_ode(specs[name], k).entries
    oracle = narrow_rectangle_oracle(specs[name], k, width=1e-5).entries
    np.testing.assert_allclose(exact, oracle, atol=1e-3)


def test_analytic_transfer_is_limited_to_closed_forms(specs) -> None:
  with pytest.raises(UnsupportedFamily):
    analytic_transfer(specs['gaussian'], 1.0)
  with pytest.raises(UnsupportedFamily):
    narrow_rectangle_oracle(specs['barrier'], 1.0)


@pytest.mark.parametrize('name', ['barrier_complex', 'delta_pair_complex'])
def test_reflected_wavenumber_symmetry(specs, name) -> None:
  for k in (0.5, 1.0, 2.0):
    plus = analytic_transfer(specs[name], k)
    minus = analytic_transfer(specs[name], -k)
    assert plus.m11 == pytest.approx(minus.m22, abs=1e-10)
    assert plus.m12 == pytest.approx(minus.m21, abs=1e-10)


@pytest.mark.parametrize('name', ['barrier', 'delta_pair', 'gaussian', 'cosine_real'])
def test_unitarity_for_real_potentials(specs, name) -> None:
  for k in (0.5, 1.0, 2.0):
    a = amplitudes_from_transfer(transfer_matrix_ode(specs[name], k))
    assert abs(a.r_left) ** 2 + abs(a.t) ** 2 == pytest.approx(1.0, abs=1e-8)
    assert abs(a.r_right) ** 2 + abs(a.t) ** 2 == pytest.approx(1.0, abs=1e-8)


def test_amplitudes_round_trip() -> None:
  amplitudes = ScatteringAmplitudes(r_left=0.2 + 0.1j, r_right=-0.3j, t=0.9 - 0.1j, k=1.0)
  back = amplitudes_from_transfer(transfer_from_amplitudes(amplitudes))
  assert back.r_left == pytest.approx(amplitudes.r_left)
  assert back.r_right == pytest.approx(amplitudes.r_right)
  assert back.t == pytest.approx(amplitudes.t)


def test_spectral_singularity_of_single_delta() -> None:
  # 1 + iz/2k = 0 for z = 2ik
  spec = make_spec(Family.DELTA_PAIR, z1=2j, z2=0.0, a1=0.0, a2=1.0)
  with pytest.raises(SpectralSingularity):
    amplitudes_from_transfer(transfer_matrix_ode(spec, 1.0))


def test_invalid_wavenumber(specs) -> None:
  with pytest.raises(InvalidWavenumber):
    transfer_matrix_ode(specs['barrier'], 0.0)
  with pytest.raises(InvalidWavenumber):
    analytic_transfer(specs['barrier'], 0.0)


def test_json_record(specs) -> None:
  record = analytic_transfer(specs['barrier'], 1.0).to_json()
  assert record['method'] == 'analytic'
  assert len(record['M']) == 4
  assert all(len(pair) == 2 for pair in record['M'])
