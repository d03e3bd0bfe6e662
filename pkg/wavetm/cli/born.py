"""`wavetm born`: Born terms and partial sums."""

import warnings

import click
import numpy as np

from wavetm.born_series import born_sum
from wavetm.cli.common import RunConfig, read_spec, run_command, write_json
from wavetm.errors import NonconvergentSeries, SpectralSingularity
from wavetm.potential_model import complex_pair
from wavetm.provenance import RunRecorder
from wavetm.transfer_exact import amplitudes_from_transfer


@click.command('born')
@click.option('--spec', 'spec_path', required=True, help='Potential spec JSON file')
@click.option('--k', 'k', type=float, required=True, help='Wavenumber')
@click.option('--order', type=int, default=2, show_default=True, help='Highest Born order')
@click.option('--tol', type=float, default=None, help='Integrator tolerance')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output JSON file')
def born(spec_path, k, order, tol, out):
  """Born terms M^(1..N), their sum and a tail estimate."""
  config = RunConfig(subcommand='born', spec=spec_path, k=k, order=order, tol=tol, out=out)

  def body(recorder: RunRecorder) -> None:
    spec = read_spec(spec_path)
    with recorder.step('born_sum', {'k': k, 'order': order}) as outputs:
      with warnings.catch_warnings():
        warnings.simplefilter('ignore', NonconvergentSeries)
        result = born_sum(spec, k, order, tol)
      outputs['nonconvergent'] = result.nonconvergent
    try:
      amplitudes = amplitudes_from_transfer(result.matrix).to_json()
    except SpectralSingularity as e:
      amplitudes = {'error': str(e)}
    payload = {
      'k': k,
      'order': order,
      'M': [complex_pair(v) for v in np.ravel(result.matrix.entries)],
      'residual_estimate': result.residual_estimate,
      'nonconvergent': result.nonconvergent,
      'terms': [
        {'order': t.order, 'M': [complex_pair(v) for v in np.ravel(t.matrix)]}
        for t in result.terms
      ],
      'amplitudes': amplitudes,
    }
    write_json(payload, out, recorder)

  run_command(config, body)
