import sys

from prowlnet.cli import main

sys.exit(main())
