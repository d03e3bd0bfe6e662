import numpy as np
import pytest
from scipy.linalg import expm

from wavetm.errors import DistributionalPotential
from wavetm.potential_model import Family, make_spec
from wavetm.two_level import (
  N_MATRIX,
  SIGMA_3,
  Picture,
  StateVector,
  hamiltonian_at,
  interaction_matrix,
  schroedinger_matrix,
  spectral_diagnostic,
)


def test_interaction_matrix_removes_free_evolution() -> None:
  w, tau = 0.3 - 0.2j, 0.7
  u0 = expm(1j * tau * SIGMA_3)
  expected = np.linalg.inv(u0) @ (w * N_MATRIX) @ u0
  np.testing.assert_allclose(interaction_matrix(w, tau), expected, atol=1e-15)


def test_interaction_matrix_broadcasts() -> None:
  out = interaction_matrix(np.array([0.1, 0.2]), np.array([[0.0], [1.0], [2.0]]))
  assert out.shape == (3, 2, 2, 2)


def test_schroedinger_matrix_invariants() -> None:
  w = 0.4 + 0.1j
  h = schroedinger_matrix(w)
  assert np.trace(h) == pytest.approx(0)
  assert np.linalg.det(h) == pytest.approx(2 * w - 1)


def test_hamiltonian_at_barrier() -> None:
  spec = make_spec(Family.RECTANGULAR_BARRIER, z=2.0, L=1.0)
  k = 2.0
  inside = hamiltonian_at(spec, k, 0.5 * k)
  assert inside.w == pytest.approx(2.0 / (2 * k * k))
  assert inside.trace == pytest.approx(0)
  outside = hamiltonian_at(spec, k, 3.0 * k, Picture.INTERACTION)
  np.testing.assert_allclose(outside.matrix, np.zeros((2, 2)))
  assert outside.picture == Picture.INTERACTION


def test_hamiltonian_rejects_delta_pairs(specs) -> None:
  with pytest.raises(DistributionalPotential):
    hamiltonian_at(specs['delta_pair'], 1.0, 0.0)


def test_state_vector_round_trip() -> None:
  state = StateVector.from_wave(1.0 + 2.0j, -0.5 + 0.25j)
  assert state.phi == pytest.approx(1.0 + 2.0j)
  assert state.phi_dot == pytest.approx(-0.5 + 0.25j)


def test_plane_waves_occupy_one_component() -> None:
  tau = 0.8
  right = StateVector.from_wave(np.exp(1j * tau), 1j * np.exp(1j * tau))
  left = StateVector.from_wave(np.exp(-1j * tau), -1j * np.exp(-1j * tau))
  np.testing.assert_allclose(right.components, [np.exp(1j * tau), 0], atol=1e-15)
  np.testing.assert_allclose(left.components, [0, np.exp(-1j * tau)], atol=1e-15)


def test_spectrum_of_real_barrier() -> None:
  spec = make_spec(Family.RECTANGULAR_BARRIER, z=1.0, L=1.0)
  k = 2.0
  diagnostic = spectral_diagnostic(spec, k, 0.5 * k)
  n = np.sqrt(1 - 1.0 / k**2)
  assert diagnostic.e_plus == pytest.approx(n)
  assert diagnostic.e_minus == pytest.approx(-n)
  assert not diagnostic.exceptional
  assert diagnostic.pseudo_hermitian_residual == 0.0
  assert np.isfinite(diagnostic.eigenvector_condition)


def test_complex_potential_breaks_pseudo_hermiticity(specs) -> None:
  diagnostic = spectral_diagnostic(specs['barrier_complex'], 1.0, 0.5)
  assert diagnostic.pseudo_hermitian_residual > 1e-3


def test_turning_point_is_exceptional() -> None:
  spec = make_spec(Family.RECTANGULAR_BARRIER, z=1.0, L=1.0, coupling={'k_squared': 1.0})
  for k in (0.5, 3.0):
    diagnostic = spectral_diagnostic(spec, k, 0.5 * k)
    assert diagnostic.exceptional
    assert abs(diagnostic.e_plus) < 1e-12
    assert diagnostic.eigenvector_condition > 1e8


def test_condition_number_grows_near_turning_point() -> None:
  k = 1.0
  conditions = []
  for z in (0.5, 0.9, 0.999):
    spec = make_spec(Family.RECTANGULAR_BARRIER, z=z, L=1.0)
    conditions.append(spectral_diagnostic(spec, k, 0.5).eigenvector_condition)
  assert conditions[0] < conditions[1] < conditions[2]
