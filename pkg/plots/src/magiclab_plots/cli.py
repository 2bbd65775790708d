"""plot --kind <k> --in <csv> --out <file>; exit 2 on schema mismatch."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotSpec, SchemaError, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="magiclab-plot")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="inputs", action="append", required=True,
                    help="input CSV (repeatable)")
    ap.add_argument("--out", required=True)
    ap.add_argument("--sidecar", help="collapse parameters JSON (critical, nu)")
    ap.add_argument("--column", default="max_block", help="histogram column")
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else 2
    try:
        spec = PlotSpec(args.kind, args.inputs, args.out, args.sidecar, args.column)
        render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
