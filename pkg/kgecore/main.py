"""KGECore 主模块入口"""

import sys

from kgecore.cli.app import main

if __name__ == "__main__":
    sys.exit(main())

__all__ = ["main"]
