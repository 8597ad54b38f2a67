"""Command-line entry points for the two figure types.

Exit codes: 0 success, 2 on malformed input or bad options, 1 on other
failures.  Inputs are opened read-only and never modified.
"""

from __future__ import annotations

import argparse
import sys

from .io import FormatError
from .render import FigureSpec, plot_bifurcation, plot_distribution


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split("x")
        rows, cols = int(rows), int(cols)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected RxC (e.g. 3x3), got {text!r}"
        ) from None
    if rows < 1 or cols < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return rows, cols


def bifurcation_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-bifurcation",
        description="Render a bifurcation CSV as a tolerance/opinion heatmap",
    )
    parser.add_argument("csv", help="bifurcation CSV (bin_center,d=... header)")
    parser.add_argument("-o", "--output", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        plot_bifurcation(FigureSpec(inputs=[ns.csv], output=ns.output, dpi=ns.dpi))
    except (FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {ns.output}")
    return 0


def distribution_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-distribution",
        description="Render distribution CSVs as overlaid curves or a panel grid",
    )
    parser.add_argument("csv", nargs="+", help="distribution CSV(s)")
    parser.add_argument("-o", "--output", required=True, help="output image path")
    parser.add_argument("--grid", type=_parse_grid, default=None,
                        help="panel layout RxC (default: overlay)")
    parser.add_argument("--dpi", type=int, default=150)
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        plot_distribution(FigureSpec(inputs=ns.csv, output=ns.output,
                                     grid=ns.grid, dpi=ns.dpi))
    except (FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {ns.output}")
    return 0


def bifurcation_entry() -> None:
    sys.exit(bifurcation_main())


def distribution_entry() -> None:
    sys.exit(distribution_main())
