"""
    Runs the ``hypocert`` command line, see :mod:`hypocert.cli`.
"""

import sys

from .cli import main

sys.exit(main())
