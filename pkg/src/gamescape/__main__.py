import sys

from gamescape.cli import main

sys.exit(main())
