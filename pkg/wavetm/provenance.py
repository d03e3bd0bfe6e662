"""Run records echoed into output sidecars."""

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from wavetm.config import Settings


class RunStep(BaseModel):
  """One named computation inside a run."""

  name: str
  inputs: Dict[str, Any] = {}
  outputs: Dict[str, Any] = {}
  status: str = 'RUNNING'  # RUNNING, SUCCESS, ERROR

  def complete(self, outputs: Optional[Dict[str, Any]] = None, status: str = 'SUCCESS'):
    """Mark step as complete."""
    if outputs is not None:
      self.outputs = outputs
    self.status = status


class RunRecord(BaseModel):
  """Config echo, tolerance provenance and steps of a CLI run.

  No wall-clock fields are stored so that identical configs produce
  byte-identical sidecars.
  """

  subcommand: str
  config: Dict[str, Any]
  settings: Dict[str, Any]
  steps: List[RunStep] = []
  status: str = 'RUNNING'


class RunRecorder:
  """Collects steps for a single run and writes the sidecar."""

  def __init__(self, subcommand: str, config: Dict[str, Any], settings: Settings):
    """Initialize recorder.

    Args:
        subcommand: CLI subcommand name
        config: Serialized RunConfig
        settings: Settings in force for the run
    """
    self.record = RunRecord(
      subcommand=subcommand, config=config, settings=settings.model_dump(mode='json')
    )

  def add_step(self, name: str, inputs: Optional[Dict[str, Any]] = None) -> RunStep:
    """Append a running step."""
    step = RunStep(name=name, inputs=inputs or {})
    self.record.steps.append(step)
    return step

  @contextmanager
  def step(self, name: str, inputs: Optional[Dict[str, Any]] = None):
    """Context manager for recording a step.

    Args:
        name: Step name
        inputs: Input parameters

    Yields:
        A dict to store outputs
    """
    step = self.add_step(name, inputs)
    outputs: Dict[str, Any] = {}
    status = 'SUCCESS'
    try:
      yield outputs
    except Exception as e:
      status = 'ERROR'
      outputs['error'] = str(e)
      raise
    finally:
      step.complete(outputs, status)

  def complete(self, status: str = 'SUCCESS') -> RunRecord:
    """Mark the run as complete."""
    self.record.status = status
    return self.record

  def write_sidecar(self, out_path: Path) -> Path:
    """Write `<out>.meta.json` next to an output file."""
    sidecar = out_path.with_name(out_path.name + '.meta.json')
    with open(sidecar, 'w') as f:
      json.dump(self.record.model_dump(mode='json'), f, indent=2, sort_keys=True)
      f.write('\n')
    return sidecar
