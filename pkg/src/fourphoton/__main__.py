import sys

from fourphoton.cli import main

sys.exit(main())
