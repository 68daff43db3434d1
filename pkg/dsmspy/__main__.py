import sys

from dsmspy.cli import main

sys.exit(main())
