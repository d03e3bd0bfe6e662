"""Logger factory with a single rich handler."""

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

_ROOT = 'wavetm'
_configured = False


def _configure() -> None:
  global _configured
  if _configured:
    return
  handler = RichHandler(
    console=Console(stderr=True), show_time=False, show_path=False, rich_tracebacks=True
  )
  handler.setFormatter(logging.Formatter('%(name)s: %(message)s'))
  root = logging.getLogger(_ROOT)
  root.addHandler(handler)
  root.setLevel(os.environ.get('WAVETM_LOG_LEVEL', 'WARNING').upper())
  root.propagate = False
  _configured = True


def get_logger(name: str) -> logging.Logger:
  """Get a logger under the `wavetm` namespace."""
  _configure()
  if not name.startswith(_ROOT):
    name = f'{_ROOT}.{name}'
  return logging.getLogger(name)
