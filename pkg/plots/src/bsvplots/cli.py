"""Command line: bsvplot <kind> --in FILES... --out IMG [--x-axis nm|omega]

Kinds: spectrum, weights, k_vs_g, g2_sweep, modes.  Reads only the
simulator's documented CSV/JSON schemas; exit code 1 on schema errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, render
from .io import SchemaError


def build_parser():
    ap = argparse.ArgumentParser(prog="bsvplot", description=__doc__)
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--in", dest="inputs", nargs="+", required=True,
                    metavar="FILE", help="input CSV/JSON files")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--x-axis", choices=("nm", "omega"), default="nm")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=Path(args.out),
            x_axis=args.x_axis,
        )
        result = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.path} ({result.kind}, pass-through verified)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
