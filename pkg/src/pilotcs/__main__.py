import sys

from pilotcs.cli import main

sys.exit(main())
