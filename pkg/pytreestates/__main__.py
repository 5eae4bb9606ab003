import sys

from pytreestates.cli import main

sys.exit(main())
