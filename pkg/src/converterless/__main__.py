import sys

from converterless.cli import main

sys.exit(main())
