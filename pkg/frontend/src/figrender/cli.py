"""render: command-line front end for the CSV figure renderer."""

from __future__ import annotations

import argparse
import sys

from .render import COLUMN_CONTRACTS, FigureJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a deltagauss CSV into a figure."
    )
    parser.add_argument("--mode", required=True, choices=sorted(COLUMN_CONTRACTS))
    parser.add_argument("--in", dest="input_csv", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_image", required=True, metavar="IMG")
    parser.add_argument("--logx", action="store_true", help="logarithmic x axis")
    parser.add_argument("--ylim", metavar="LO,HI", default=None,
                        help="y-axis limits, comma separated")
    parser.add_argument("--svg", action="store_true", help="write SVG instead of PNG")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    y_limits = None
    if args.ylim is not None:
        parts = args.ylim.split(",")
        if len(parts) != 2:
            print(f"error: --ylim expects LO,HI, got {args.ylim!r}", file=sys.stderr)
            return 2
        try:
            y_limits = (float(parts[0]), float(parts[1]))
        except ValueError:
            print(f"error: --ylim expects numbers, got {args.ylim!r}", file=sys.stderr)
            return 2
    try:
        job = FigureJob(
            input_csv=args.input_csv,
            mode=args.mode,
            output_image=args.output_image,
            log_x=args.logx,
            y_limits=y_limits,
            vector=args.svg,
        )
        render(job)
    except (SchemaError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
