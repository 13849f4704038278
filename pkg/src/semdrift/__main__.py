"""Allow ``python -m semdrift`` to behave like the installed command."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
