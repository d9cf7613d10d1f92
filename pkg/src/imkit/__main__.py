import sys

from imkit.cli import main

sys.exit(main())
