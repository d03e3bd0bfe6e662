"""Command-line interface for wavetm."""

import click

from wavetm import __version__
from wavetm.cli.born import born
from wavetm.cli.invert import invert
from wavetm.cli.invisibility import invisibility
from wavetm.cli.scan import scan_command
from wavetm.cli.scatter import scatter
from wavetm.cli.validate import validate


@click.group()
@click.version_option(__version__, prog_name='wavetm')
def main():
  """Transfer-matrix scattering, Born series and invisibility tools."""


main.add_command(scatter)
main.add_command(scan_command)
main.add_command(born)
main.add_command(invisibility)
main.add_command(invert)
main.add_command(validate)
