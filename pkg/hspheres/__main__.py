import sys
from hspheres.cli import main

sys.exit(main())
