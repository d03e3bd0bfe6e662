"""Entry point for `python -m wavetm`."""

from wavetm.cli import main

if __name__ == '__main__':
  main()
