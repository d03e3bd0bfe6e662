"""`wavetm validate`: run the acceptance checks against the shipped fixtures."""

import sys

import click

from wavetm.acceptance import load_fixtures, run_acceptance
from wavetm.cli.common import EXIT_FAILURE, RunConfig, console, run_command, write_json
from wavetm.provenance import RunRecorder


@click.command('validate')
@click.option(
  '--fixtures',
  'fixtures_dir',
  type=click.Path(file_okay=False),
  default='fixtures',
  show_default=True,
  help='Directory holding the fixture specs',
)
@click.option('--full-scan', is_flag=True, help='Also run the full default-grid scan')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output JSON file')
def validate(fixtures_dir, full_scan, out):
  """Machine-readable pass/fail summary of every acceptance check."""
  config = RunConfig(
    subcommand='validate', out=out, extra={'fixtures': fixtures_dir, 'full_scan': full_scan}
  )
  outcome = {}

  def body(recorder: RunRecorder) -> None:
    fixtures = load_fixtures(fixtures_dir)
    with recorder.step('acceptance', {'fixtures': sorted(fixtures)}) as outputs:
      report = run_acceptance(fixtures, full_scan)
      outputs['passed'] = report.passed
      outputs['failed'] = [c.name for c in report.checks if not c.passed]
    outcome['passed'] = report.passed
    write_json(report.to_json(), out, recorder)

  run_command(config, body)
  if not outcome['passed']:
    console.print('[red]acceptance checks failed[/red]')
    sys.exit(EXIT_FAILURE)
