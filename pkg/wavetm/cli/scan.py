"""`wavetm scan`: amplitude magnitudes over a wavenumber grid."""

from pathlib import Path

import click
import numpy as np
import pandas as pd

from wavetm.cli.common import RunConfig, read_spec, run_command, write_frame
from wavetm.config import get_settings
from wavetm.errors import InputError
from wavetm.invisibility import default_k_grid, scan
from wavetm.potential_model import PotentialSpec, refractive_index
from wavetm.provenance import RunRecorder

SCAN_METHODS = ['ode', 'born1', 'born2', 'bornN']

DIAGNOSTIC_SAMPLES = 401

GNUPLOT_TEMPLATE = """set datafile separator ','
set key autotitle columnhead
set logscale y
set xlabel 'k'
set ylabel 'magnitude'
plot '{csv}' using 1:2 with lines title '|R^l|', \\
     '{csv}' using 1:3 with lines title '|R^r|', \\
     '{csv}' using 1:4 with lines title '|T-1|'
"""


def diagnostic_columns(spec: PotentialSpec, k_values: np.ndarray) -> pd.DataFrame:
  """min |n(x)| over the support and whether a turning point lies inside it."""
  if spec.distributional:
    raise InputError('--diagnostics needs pointwise potential values', 'family')
  tol = get_settings().spectral.coalescence_tol
  lo, hi = spec.window()
  x = np.linspace(lo, hi, DIAGNOSTIC_SAMPLES)
  min_n, exceptional = [], []
  for k in k_values:
    n = np.abs(refractive_index(spec, x, k))
    min_n.append(float(n.min()))
    exceptional.append(bool((n**2 <= tol).any()))
  return pd.DataFrame({'min_abs_n': min_n, 'exceptional': exceptional})


def write_gnuplot_script(csv_path: str) -> Path:
  """Write <csv>.gp plotting the three magnitude columns."""
  script = Path(csv_path + '.gp')
  script.write_text(GNUPLOT_TEMPLATE.format(csv=Path(csv_path).name))
  return script


@click.command('scan')
@click.option('--spec', 'spec_path', required=True, help='Potential spec JSON file')
@click.option('--k-min', type=float, default=None, help='Smallest wavenumber')
@click.option('--k-max', type=float, default=None, help='Largest wavenumber')
@click.option('--k-steps', type=int, default=None, help='Number of grid points')
@click.option('--method', type=click.Choice(SCAN_METHODS), default='ode', show_default=True)
@click.option('--order', type=int, default=None, help='Series order for bornN')
@click.option('--tol', type=float, default=None, help='Integrator tolerance')
@click.option('--diagnostics', is_flag=True, help='Add min |n| and turning-point columns')
@click.option('--gnuplot-script', is_flag=True, help='Also write <out>.gp')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output CSV file')
def scan_command(
  spec_path, k_min, k_max, k_steps, method, order, tol, diagnostics, gnuplot_script, out
):
  """|R^l|, |R^r| and |T - 1| over a k grid as CSV."""
  config = RunConfig(
    subcommand='scan',
    spec=spec_path,
    k_min=k_min,
    k_max=k_max,
    k_steps=k_steps,
    method=method,
    order=order,
    tol=tol,
    out=out,
    extra={'diagnostics': diagnostics, 'gnuplot_script': gnuplot_script},
  )

  def body(recorder: RunRecorder) -> None:
    spec = read_spec(spec_path)
    if method == 'bornN' and order is None:
      raise InputError('bornN needs --order', 'order')
    if gnuplot_script and out is None:
      raise InputError('--gnuplot-script needs --out', 'gnuplot_script')
    grid = config.k_grid()
    if grid is None:
      grid = default_k_grid(spec)
    with recorder.step('scan', {'points': len(grid), 'method': method}) as outputs:
      frame = scan(spec, grid, method, order, tol).to_frame()
      outputs['flagged'] = int((frame['flags'] != '').sum())
    if diagnostics:
      with recorder.step('diagnostics', {'samples': DIAGNOSTIC_SAMPLES}):
        extra = diagnostic_columns(spec, frame['k'].to_numpy())
      frame = pd.concat([frame, extra], axis=1)
    if gnuplot_script:
      recorder.add_step('gnuplot_script', {'path': str(write_gnuplot_script(out))}).complete()
    write_frame(frame, out, recorder)

  run_command(config, body)
