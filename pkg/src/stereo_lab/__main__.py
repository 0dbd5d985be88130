import sys

from stereo_lab.cli import main

sys.exit(main())
