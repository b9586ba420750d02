"""Repository entrypoint shim for the IP tree fuzz runner."""
from ip_trees.cli.ipt_fuzz import main


if __name__ == "__main__":
    raise SystemExit(main())
