"""pgfig <kind> --in a.csv [b.csv ...] --out fig.png"""

from __future__ import annotations

import argparse
import sys

from .jobs import KINDS, FigureError, FigureJob
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pgfig",
        description="Render figures from poisson-growth experiment CSVs.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV files (defect-overlay: replica.csv "
                             "region.csv aggregate.csv)")
    parser.add_argument("--out", required=True, help="output image path")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        job = FigureJob(args.kind, args.inputs, args.out)
        summary = render(job)
    except FigureError as exc:
        print(f"pgfig: {exc}", file=sys.stderr)
        return 1
    print(f"{args.out}: {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
