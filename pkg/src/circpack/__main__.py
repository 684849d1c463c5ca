import sys

from circpack.cli import main

sys.exit(main())
