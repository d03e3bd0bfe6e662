"""Shared fixtures: the shipped potential specs and a clean settings cache."""

from pathlib import Path

import pytest

from wavetm.acceptance import load_fixtures
from wavetm.config import get_settings

FIXTURES_DIR = Path(__file__).resolve().parent.parent / 'fixtures'


@pytest.fixture(scope='session')
def specs():
  """Every fixture spec keyed by file stem."""
  return load_fixtures(FIXTURES_DIR)


@pytest.fixture
def fixture_path():
  def path(name: str) -> str:
    return str(FIXTURES_DIR / f'{name}.json')

  return path


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
  monkeypatch.delenv('WAVETM_CONFIG', raising=False)
  monkeypatch.delenv('WAVETM_THREADS', raising=False)
  get_settings.cache_clear()
  yield
  get_settings.cache_clear()
