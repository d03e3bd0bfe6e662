"""`wavetm invisibility`: classify locally periodic specs and verify the predictions."""

import click

from wavetm.cli.common import RunConfig, read_spec, run_command, write_json
from wavetm.errors import SpectralSingularity
from wavetm.invisibility import classify_theorem2, verify_prediction
from wavetm.provenance import RunRecorder


@click.command('invisibility')
@click.option('--spec', 'spec_path', required=True, help='Potential spec JSON file')
@click.option('--jmax', type=int, default=None, help='Largest harmonic examined')
@click.option('--strict', is_flag=True, help='Require an even number of periods')
@click.option(
  '--method',
  type=click.Choice(['ode', 'born1', 'born2', 'bornN']),
  default='ode',
  show_default=True,
  help='Engine used to verify predictions',
)
@click.option('--order', type=int, default=None, help='Series order for bornN')
@click.option('--no-verify', is_flag=True, help='Only classify')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output JSON file')
def invisibility(spec_path, jmax, strict, method, order, no_verify, out):
  """Predicted reflectionless wavenumbers with coupling-scaling verdicts."""
  config = RunConfig(
    subcommand='invisibility',
    spec=spec_path,
    method=method,
    order=order,
    out=out,
    extra={'jmax': jmax, 'strict': strict, 'verify': not no_verify},
  )

  def body(recorder: RunRecorder) -> None:
    spec = read_spec(spec_path)
    with recorder.step('classify', {'jmax': jmax, 'strict': strict}) as outputs:
      predictions = classify_theorem2(spec, jmax, strict)
      outputs['count'] = len(predictions)
    entries = []
    for prediction in predictions:
      entry = {'prediction': prediction.model_dump(mode='json')}
      if not no_verify:
        try:
          report = verify_prediction(spec, prediction, method, order)
        except SpectralSingularity as e:
          entry['verification'] = {'passed': False, 'detail': str(e)}
        else:
          entry['verification'] = report.model_dump(mode='json', exclude={'prediction'})
      entries.append(entry)
    verified = [e['verification']['passed'] for e in entries if 'verification' in e]
    payload = {
      'family': spec.family.value,
      'predictions': entries,
      'all_verified': all(verified) if verified else None,
    }
    write_json(payload, out, recorder)

  run_command(config, body)
