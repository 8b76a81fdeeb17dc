"""Fit a 24-vertex polygon to each built-in shape and save snapshot overlays.

    python3 scripts/demo_snapshots.py --out-dir results/demo
"""

import argparse
import json
import sys

from polarpoly.cli import main as cli_main
from polarpoly.shapes import BUILTIN


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results/demo")
    ap.add_argument("--shapes", nargs="+", default=sorted(BUILTIN), choices=sorted(BUILTIN))
    args = ap.parse_args()
    for name in args.shapes:
        code = cli_main(["demo", "--shape", name, "--out-dir", f"{args.out_dir}/{name}"])
        if code:
            sys.exit(code)
    # the demo subcommand already printed one JSON line per shape
    print(json.dumps({"out_dir": args.out_dir, "shapes": args.shapes}), file=sys.stderr)


if __name__ == "__main__":
    main()
