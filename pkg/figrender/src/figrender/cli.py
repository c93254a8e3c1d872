"""Command-line entry point: render one preset CSV to an image.

Exit codes: 0 success, 2 unusable input (missing file, missing column,
empty CSV).  The image format follows the --out extension (anything
matplotlib's Agg backend can write: png, pdf, svg, ...).
"""
from __future__ import annotations

import argparse
import sys

from .figures import RenderInputError, build_specs, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a preset sweep dataset (CSV) to a figure image.")
    parser.add_argument("--preset", required=True, choices=sorted(build_specs()),
                        help="which figure preset the CSV holds")
    parser.add_argument("--in", dest="src", required=True, metavar="CSV",
                        help="input CSV path (phonent fig output)")
    parser.add_argument("--out", required=True, metavar="IMG",
                        help="output image path; format from extension")
    parser.add_argument("--dpi", type=int, default=150,
                        help="raster resolution (default %(default)s)")
    return parser


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = build_specs()[args.preset]
    try:
        render(spec, args.src, args.out, dpi=args.dpi)
    except RenderInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
