import json

import pytest

from wavetm.config import Settings
from wavetm.provenance import RunRecorder


def test_step_records_outputs_and_status() -> None:
  recorder = RunRecorder('scatter', {'k': 1.0}, Settings())
  with recorder.step('transfer_matrix', {'k': 1.0}) as outputs:
    outputs['det_residual'] = 0.0
  step = recorder.record.steps[0]
  assert step.status == 'SUCCESS'
  assert step.outputs == {'det_residual': 0.0}


def test_failed_step_is_marked_and_reraised() -> None:
  recorder = RunRecorder('scan', {}, Settings())
  with pytest.raises(RuntimeError):
    with recorder.step('scan'):
      raise RuntimeError('boom')
  step = recorder.record.steps[0]
  assert step.status == 'ERROR'
  assert step.outputs['error'] == 'boom'


def test_sidecar_is_deterministic(tmp_path) -> None:
  out = tmp_path / 'result.json'
  texts = []
  for _ in range(2):
    recorder = RunRecorder('born', {'order': 2}, Settings())
    recorder.add_step('born_sum', {'k': 1.0}).complete({'nonconvergent': False})
    recorder.complete()
    sidecar = recorder.write_sidecar(out)
    texts.append(sidecar.read_text())
  assert sidecar.name == 'result.json.meta.json'
  assert texts[0] == texts[1]
  record = json.loads(texts[0])
  assert record['config'] == {'order': 2}
  assert record['settings']['ode']['tol'] == pytest.approx(1e-10)
  assert record['status'] == 'SUCCESS'
