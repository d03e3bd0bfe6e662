import pytest
from pydantic import ValidationError

from wavetm.config import Settings, build_settings, get_settings, load_config


def test_repository_config_matches_model_defaults() -> None:
  assert build_settings(load_config()) == Settings()


def test_defaults() -> None:
  settings = get_settings()
  assert settings.ode.tol == pytest.approx(1e-10)
  assert settings.quadrature.truncation_threshold == pytest.approx(1e-14)
  assert settings.spectral.coalescence_tol == pytest.approx(1e-9)
  assert settings.invisibility.scan_points == 1200
  assert settings.threads == 1


def test_env_config_path(tmp_path, monkeypatch) -> None:
  path = tmp_path / 'custom.yaml'
  path.write_text('ode:\n  tol: 1.0e-8\nthreads: 3\n')
  monkeypatch.setenv('WAVETM_CONFIG', str(path))
  settings = get_settings()
  assert settings.ode.tol == pytest.approx(1e-8)
  assert settings.ode.det_tol == pytest.approx(1e-9)
  assert settings.threads == 3


def test_missing_config_file_gives_defaults(tmp_path) -> None:
  assert load_config(tmp_path / 'absent.yaml') == {}


def test_threads_from_environment(monkeypatch) -> None:
  monkeypatch.setenv('WAVETM_THREADS', '4')
  assert build_settings({}).threads == 4
  monkeypatch.setenv('WAVETM_THREADS', '0')
  assert build_settings({}).threads == 1


def test_settings_are_frozen() -> None:
  with pytest.raises(ValidationError):
    get_settings().ode.tol = 1.0
