"""Command line front end for the figure renderers.

Exit codes: 0 on success, 2 when an input file violates its contract, 3 when
reading an input or writing the image fails at the file system level.
"""

from __future__ import annotations

import argparse
import sys

from .errors import MalformedInput
from .render import PANEL_NAMES, render_convergence, render_heatmap


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infogap-figures",
        description="Render heatmaps and convergence plots from infogap output files.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    heatmap = commands.add_parser(
        "heatmap", help="render the gap heatmap from a sweep CSV"
    )
    heatmap.add_argument("--csv", required=True, help="sweep CSV file to read")
    heatmap.add_argument("--out", required=True, help="PNG file to write")
    heatmap.add_argument(
        "--panel",
        choices=PANEL_NAMES,
        default="both",
        help="which rate window to draw (default: both)",
    )

    convergence = commands.add_parser(
        "convergence", help="render the log-log error plot from a convergence JSON"
    )
    convergence.add_argument("--json", required=True, help="convergence JSON to read")
    convergence.add_argument("--out", required=True, help="PNG file to write")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "heatmap":
            render_heatmap(args.csv, args.out, panel=args.panel)
        else:
            render_convergence(args.json, args.out)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
