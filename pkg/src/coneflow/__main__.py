import sys

from coneflow.cli import main

sys.exit(main())
