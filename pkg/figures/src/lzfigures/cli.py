"""Render CLI: lzbath-render --figure fig4 --csv-dir data --out fig4.png

Exit codes: 0 success, 2 bad arguments or schema violation.
"""

from __future__ import annotations

import argparse
import sys

from .reader import SchemaError
from .render import FIGURE_IDS, FigureSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lzbath-render",
        description="Regenerate a figure from simulation CSV output; the "
                    "output format follows the file extension (png/pdf/svg).")
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument("--csv-dir", required=True,
                        help="directory containing <figure>/<label>.csv inputs")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(args.figure, args.csv_dir, args.out))
    except (SchemaError, ValueError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
