import sys

from lpmult.cli import main

sys.exit(main())
