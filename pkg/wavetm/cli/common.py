"""Shared plumbing for the subcommands: run configs, spec loading, outputs and exit codes."""

import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError
from rich.console import Console

from wavetm.config import get_settings
from wavetm.errors import InputError, WaveTMError
from wavetm.logging_config import get_logger
from wavetm.potential_model import PotentialSpec, load_spec
from wavetm.provenance import RunRecorder

logger = get_logger(__name__)

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2


class RunConfig(BaseModel):
  """Everything needed to reproduce a CLI run."""

  subcommand: str
  spec: Optional[str] = None
  k: Optional[float] = None
  k_min: Optional[float] = None
  k_max: Optional[float] = None
  k_steps: Optional[int] = None
  method: Optional[str] = None
  order: Optional[int] = None
  tol: Optional[float] = None
  out: Optional[str] = None
  extra: Dict[str, Any] = {}

  def k_grid(self) -> Optional[np.ndarray]:
    """Uniform grid from --k-min/--k-max/--k-steps, or None when not given."""
    given = [self.k_min, self.k_max, self.k_steps]
    if all(v is None for v in given):
      return None
    if any(v is None for v in given):
      raise InputError('--k-min, --k-max and --k-steps go together', 'k_grid')
    if self.k_steps < 1 or not 0 < self.k_min <= self.k_max:
      raise InputError('need 0 < k-min <= k-max and k-steps >= 1', 'k_grid')
    return np.linspace(self.k_min, self.k_max, self.k_steps)


def field_path(error: ValidationError) -> str:
  """Dotted location of the first validation error."""
  location = error.errors()[0].get('loc', ())
  return '.'.join(str(part) for part in location)


def read_spec(path: Optional[str]) -> PotentialSpec:
  """Load a spec file, mapping every failure to InputError."""
  if not path:
    raise InputError('a potential spec file is required', 'spec')
  try:
    return load_spec(path)
  except FileNotFoundError:
    raise InputError(f'no such file: {path}', 'spec')
  except json.JSONDecodeError as e:
    raise InputError(f'invalid JSON: {e}', 'spec')
  except ValidationError as e:
    raise InputError(e.errors()[0]['msg'], field_path(e))


def write_json(payload: Dict[str, Any], out: Optional[str], recorder: RunRecorder) -> None:
  """Write a JSON report (or print it) and its sidecar."""
  text = json.dumps(payload, indent=2, sort_keys=True)
  if out is None:
    console.print_json(text)
    return
  path = Path(out)
  path.write_text(text + '\n')
  recorder.complete()
  recorder.write_sidecar(path)


def write_frame(frame: pd.DataFrame, out: Optional[str], recorder: RunRecorder) -> None:
  """Write a CSV table (or print it) and its sidecar."""
  if out is None:
    console.print(frame.to_string(index=False))
    return
  path = Path(out)
  frame.to_csv(path, index=False)
  recorder.complete()
  recorder.write_sidecar(path)


def run_command(config: RunConfig, body: Callable[[RunRecorder], None]) -> None:
  """Run a subcommand body and exit with 0, 1 (computation) or 2 (input)."""
  recorder = RunRecorder(config.subcommand, config.model_dump(mode='json'), get_settings())
  try:
    body(recorder)
  except InputError as e:
    err_console.print(f'[red]input error:[/red] {e}')
    sys.exit(EXIT_INPUT)
  except ValidationError as e:
    err_console.print(f'[red]input error:[/red] {field_path(e)}: {e.errors()[0]["msg"]}')
    sys.exit(EXIT_INPUT)
  except WaveTMError as e:
    logger.error('%s failed: %s', config.subcommand, e)
    err_console.print(f'[red]{type(e).__name__}:[/red] {e}')
    sys.exit(EXIT_FAILURE)
  recorder.complete()
