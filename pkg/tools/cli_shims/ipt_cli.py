"""Repository entrypoint shim for the ipt CLI."""
import sys

from ip_trees.cli.ipt_cli import main


if __name__ == "__main__":
    sys.exit(main())
