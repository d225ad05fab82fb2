"""Allow `python -m hyperclass`."""

import sys

from .cli import main

sys.exit(main())
