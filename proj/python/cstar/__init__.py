"""Escaping sets of transcendental self-maps of the punctured plane."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"


def main() -> int:
    import sys

    return run_cli(["cstar", *sys.argv[1:]])  # noqa: F405
