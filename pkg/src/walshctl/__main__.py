from walshctl.cli import main
import sys

sys.exit(main())
