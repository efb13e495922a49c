import sys

from hypersync.cli import main

sys.exit(main())
