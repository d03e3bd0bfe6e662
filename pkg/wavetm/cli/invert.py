"""`wavetm invert`: reconstruct v(x) from first-Born scattering data."""

from typing import Dict, Optional, Tuple

import click
import pandas as pd

from wavetm.cli.common import RunConfig, read_spec, run_command, write_frame
from wavetm.errors import InputError
from wavetm.inverse_scattering import (
  ROUTE_KINDS,
  FirstBornData,
  data_from_spec,
  reconstruct,
  registered_data,
)
from wavetm.potential_model import complex_pair, parse_complex
from wavetm.provenance import RunRecorder

CSV_COLUMNS = ['k', 're', 'im']


def parse_params(pairs: Tuple[str, ...]) -> Dict[str, complex]:
  """key=value pairs; values are real unless they carry an imaginary part."""
  params = {}
  for pair in pairs:
    key, sep, value = pair.partition('=')
    if not sep or not key:
      raise InputError(f'expected key=value, got {pair!r}', 'param')
    try:
      number = parse_complex(value)
    except ValueError:
      raise InputError(f'{key}: not a number: {value!r}', f'param.{key}')
    params[key] = number.real if number.imag == 0 else number
  return params


def read_table(path: str, route: str) -> FirstBornData:
  """Symmetric k table with columns k, re, im."""
  try:
    frame = pd.read_csv(path)
  except FileNotFoundError:
    raise InputError(f'no such file: {path}', 'csv')
  missing = [c for c in CSV_COLUMNS if c not in frame.columns]
  if missing:
    raise InputError(f'missing columns {missing}', 'csv')
  frame = frame.sort_values('k')
  try:
    return FirstBornData(
      kind=ROUTE_KINDS[route],
      k=frame['k'].to_numpy(dtype=float),
      values=frame['re'].to_numpy(dtype=float) + 1j * frame['im'].to_numpy(dtype=float),
      label=path,
    )
  except ValueError as e:
    raise InputError(str(e).splitlines()[-1], 'csv')


def select_data(
  route: str,
  data_name: Optional[str],
  params: Tuple[str, ...],
  csv_path: Optional[str],
  spec_path: Optional[str],
) -> FirstBornData:
  """Exactly one data source: a registered set, a CSV table or a spec."""
  sources = [s for s in (data_name, csv_path, spec_path) if s]
  if len(sources) != 1:
    raise InputError('give exactly one of --data, --csv or --spec', 'data')
  if data_name:
    data = registered_data(data_name, **parse_params(params))
    if data.kind != ROUTE_KINDS[route]:
      needed = ROUTE_KINDS[route]
      raise InputError(f'{data_name} holds {data.kind} data; route {route} needs {needed}', 'route')
    return data
  if params:
    raise InputError('--param only applies to --data', 'param')
  if csv_path:
    return read_table(csv_path, route)
  return data_from_spec(read_spec(spec_path), ROUTE_KINDS[route])


@click.command('invert')
@click.option('--route', type=click.Choice(sorted(ROUTE_KINDS)), required=True)
@click.option('--data', 'data_name', default=None, help='Registered analytic data set')
@click.option('--param', 'params', multiple=True, help='key=value for --data (repeatable)')
@click.option('--csv', 'csv_path', default=None, help='Table with columns k,re,im')
@click.option('--spec', 'spec_path', default=None, help='Forward data from a potential spec')
@click.option('--half-window', type=float, default=None, help='Half width of the y window')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output CSV file')
def invert(route, data_name, params, csv_path, spec_path, half_window, out):
  """v(x) as CSV columns x, re_v, im_v."""
  config = RunConfig(
    subcommand='invert',
    spec=spec_path,
    out=out,
    extra={
      'route': route,
      'data': data_name,
      'params': list(params),
      'csv': csv_path,
      'half_window': half_window,
    },
  )

  def body(recorder: RunRecorder) -> None:
    data = select_data(route, data_name, params, csv_path, spec_path)
    with recorder.step('reconstruct', {'route': route, 'label': data.label}) as outputs:
      result = reconstruct(data, route, half_window)
      outputs.update(
        {
          'alpha': complex_pair(result.alpha) if result.alpha is not None else None,
          'route': result.route,
          'kmax': result.k_max,
          'half_window': result.half_window,
          'truncated': result.truncated,
          'notes': result.notes,
        }
      )
    write_frame(result.to_frame(), out, recorder)

  run_command(config, body)
