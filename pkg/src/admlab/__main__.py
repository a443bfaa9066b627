"""python3 -m admlab entry point."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
