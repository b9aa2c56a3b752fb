"""Command line: twotone-plots <figure-kind> --in CSV [--in CSV2] --out PNG."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twotone-plots",
        description="Render static figures from twotone CSV outputs",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in FIGURE_KINDS:
        cmd = sub.add_parser(kind)
        cmd.add_argument("--in", dest="inputs", action="append", required=True,
                         metavar="CSV", help="input CSV (repeat for a second input)")
        cmd.add_argument("--out", required=True, metavar="PNG", help="output image path")
        cmd.add_argument("--dpi", type=int, default=150)
        cmd.add_argument("--no-annotations", action="store_true",
                         help="skip sideband lines / model overlays")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(args.inputs),
        out=args.out,
        dpi=args.dpi,
        annotations=() if args.no_annotations else ("sidebands", "model"),
    )
    try:
        path = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
