import sys

from dmcut.cli import main

sys.exit(main())
