import sys

from medforest.cli import main

sys.exit(main())
