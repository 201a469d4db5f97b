import sys

from structprompt.cli import main

sys.exit(main())
