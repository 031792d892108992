"""Command-line entry point: plot <figure-kind> --in a.csv [b.csv ...] --out fig.svg."""

from __future__ import annotations

import argparse
import sys

from .io import MissingColumnError
from .render import FIGURE_KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render fractransport CSV artifacts as SVG figures",
    )
    parser.add_argument("kind", choices=sorted(FIGURE_KINDS), help="figure kind")
    parser.add_argument(
        "--in",
        dest="inputs",
        nargs="+",
        required=True,
        metavar="CSV",
        help="input CSV artifact(s)",
    )
    parser.add_argument("--out", required=True, metavar="SVG", help="output SVG path")
    parser.add_argument(
        "--label",
        action="append",
        default=None,
        metavar="TEXT",
        help="per-input label override (repeatable, one per input)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.out,
            labels=tuple(args.label) if args.label else (),
        )
        render(spec)
    except (MissingColumnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
