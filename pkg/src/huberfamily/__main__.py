import sys

from huberfamily.cli import main

sys.exit(main())
