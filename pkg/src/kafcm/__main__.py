"""Allow `python3 -m kafcm <subcommand> ...`."""

import sys

from kafcm.cli_harness import main

if __name__ == "__main__":
    sys.exit(main())
