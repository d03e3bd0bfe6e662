"""Numerical defaults loaded from config.yaml and the environment."""

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / 'config.yaml'


class OdeSettings(BaseModel):
  """Interaction-picture integrator settings."""

  model_config = ConfigDict(frozen=True)

  tol: float = 1e-10
  atol_floor: float = 1e-14
  max_step: float = 0.1 * 3.141592653589793 / 2
  det_tol: float = 1e-9


class QuadratureSettings(BaseModel):
  """Composite Gauss-Legendre settings."""

  model_config = ConfigDict(frozen=True)

  tol: float = 1e-10
  nodes: int = 20
  max_panels: int = 20000
  truncation_threshold: float = 1e-14
  truncation_radius: float = 8.0


class SpectralSettings(BaseModel):
  """Two-level diagnostics and amplitude extraction tolerances."""

  model_config = ConfigDict(frozen=True)

  coalescence_tol: float = 1e-9
  singularity_tol: float = 1e-12
  denominator_tol: float = 1e-14


class InvisibilitySettings(BaseModel):
  """Classifier and scan defaults."""

  model_config = ConfigDict(frozen=True)

  eps_a_analytic: float = 1e-12
  eps_a_numeric: float = 1e-8
  j_max: int = 8
  scan_points: int = 1200
  scan_k_over_K_min: float = 0.05
  scan_k_over_K_max: float = 3.5
  suppressed_min_exponent: float = 1.8
  linear_exponent_window: float = 0.3


class InverseSettings(BaseModel):
  """Inverse Fourier transform and reconstruction defaults."""

  model_config = ConfigDict(frozen=True)

  half_window: float = 16.0
  k_max_initial: float = 64.0
  k_max_cap: float = 2.0e4
  decay_threshold: float = 1e-8
  truncation_warning: float = 1e-6
  taper_fraction: float = 0.1
  alpha_denominator_tol: float = 1e-6
  tail_fraction: float = 0.1
  tail_fit_floor: float = 1e-6
  window_doublings: int = 3


class Settings(BaseModel):
  """All tolerances and defaults used by wavetm."""

  model_config = ConfigDict(frozen=True)

  ode: OdeSettings = Field(default_factory=OdeSettings)
  quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
  spectral: SpectralSettings = Field(default_factory=SpectralSettings)
  invisibility: InvisibilitySettings = Field(default_factory=InvisibilitySettings)
  inverse: InverseSettings = Field(default_factory=InverseSettings)
  threads: int = 1


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
  """Load the raw configuration mapping from a YAML file.

  Args:
      path: Explicit path; defaults to `WAVETM_CONFIG` or the repository config.yaml

  Returns:
      The parsed mapping, or an empty dict when no file exists
  """
  config_path = path or Path(os.environ.get('WAVETM_CONFIG', DEFAULT_CONFIG_PATH))
  if config_path.exists():
    with open(config_path, 'r') as f:
      return yaml.safe_load(f) or {}
  return {}


def build_settings(raw: Dict[str, Any]) -> Settings:
  """Build settings from a raw mapping, applying environment overrides."""
  data = dict(raw)
  threads = os.environ.get('WAVETM_THREADS')
  if threads:
    data['threads'] = max(1, int(threads))
  return Settings.model_validate(data)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
  """Get the process-wide settings (immutable, built once)."""
  load_dotenv('.env')
  load_dotenv('.env.local', override=True)
  return build_settings(load_config())
