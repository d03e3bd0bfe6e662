"""`wavetm scatter`: full transfer matrix and amplitudes at one wavenumber."""

from typing import Optional

import click

from wavetm.born_series import born_sum, closed_form_term
from wavetm.cli.common import RunConfig, read_spec, run_command, write_json
from wavetm.errors import InputError
from wavetm.potential_model import PotentialSpec
from wavetm.provenance import RunRecorder
from wavetm.transfer_exact import (
  IDENTITY,
  TransferMatrix,
  amplitudes_from_transfer,
  analytic_transfer,
  transfer_matrix_ode,
)

SCATTER_METHODS = ['ode', 'analytic', 'born1', 'born2', 'bornN']


def transfer_for_method(
  spec: PotentialSpec, k: float, method: str, order: Optional[int], tol: Optional[float]
) -> TransferMatrix:
  """Transfer matrix from the named engine."""
  if method == 'ode':
    return transfer_matrix_ode(spec, k, tol)
  if method == 'analytic':
    return analytic_transfer(spec, k)
  if method in ('born1', 'born2'):
    depth = int(method[-1])
    total = IDENTITY + sum(closed_form_term(spec, k, n).matrix for n in range(1, depth + 1))
    return TransferMatrix.build(total, k, method)
  if order is None:
    raise InputError('bornN needs --order', 'order')
  return born_sum(spec, k, order, tol).matrix


def scatter_record(m: TransferMatrix) -> dict:
  """JSON record {k, M, Rl, Rr, T, det_residual, method}."""
  record = m.to_json()
  amplitudes = amplitudes_from_transfer(m).to_json()
  amplitudes.pop('order')
  record.update(amplitudes)
  return record


@click.command('scatter')
@click.option('--spec', 'spec_path', required=True, help='Potential spec JSON file')
@click.option('--k', 'k', type=float, required=True, help='Wavenumber')
@click.option('--method', type=click.Choice(SCATTER_METHODS), default='ode', show_default=True)
@click.option('--order', type=int, default=None, help='Series order for bornN')
@click.option('--tol', type=float, default=None, help='Integrator tolerance')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output JSON file')
def scatter(spec_path, k, method, order, tol, out):
  """Transfer matrix and scattering amplitudes at one wavenumber."""
  config = RunConfig(
    subcommand='scatter', spec=spec_path, k=k, method=method, order=order, tol=tol, out=out
  )

  def body(recorder: RunRecorder) -> None:
    spec = read_spec(spec_path)
    with recorder.step('transfer_matrix', {'k': k, 'method': method}) as outputs:
      record = scatter_record(transfer_for_method(spec, k, method, order, tol))
      outputs['det_residual'] = record['det_residual']
    write_json(record, out, recorder)

  run_command(config, body)
