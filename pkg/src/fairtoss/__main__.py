import sys

from fairtoss.cli import main

sys.exit(main())
