#!/usr/bin/env python3
"""Re-render the model figures (ids 2-8) from simulator CSV outputs.

Usage: python figures/make_fig.py --figure 4 --in <dir> --out fig4.png

The input directory holds the CSVs the figure consumes (see recipes.py for
per-figure file conventions). Rendering is read-only; simulations are never
re-run here. Exit codes: 0 success, 1 usage error, 2 bad/missing inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from csvio import SchemaError
from recipes import FIGURES


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--figure", type=int, required=True,
                        help=f"figure id, one of {sorted(FIGURES)}")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory with the input CSVs")
    parser.add_argument("--out", required=True, help="output image path")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    if args.figure not in FIGURES:
        print(f"error: unknown figure id {args.figure}; known: {sorted(FIGURES)}",
              file=sys.stderr)
        return 1
    recipe = FIGURES[args.figure]
    try:
        out = recipe.render(args.in_dir, args.out)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"figure {args.figure} ({recipe.kind}) -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
