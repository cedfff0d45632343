import sys

from naturisk.cli import main

sys.exit(main())
