import sys

from greenmesh.cli import main

sys.exit(main())
