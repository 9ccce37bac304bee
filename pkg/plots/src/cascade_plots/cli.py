"""plots <kind> --in <csv...> --out <png>: batch figures from cascade-lab CSVs."""
from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True, help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path (png/svg/pdf)")
    args = parser.parse_args(argv)
    try:
        summary = render(FigureSpec(args.kind, tuple(args.inputs), args.out))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(" ".join(f"{k}={v}" for k, v in summary.items()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
