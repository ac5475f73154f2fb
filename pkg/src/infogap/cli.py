"""Command-line entry point with machine-readable output.

Four subcommands: ``gap`` prints the pairwise-MI report for one channel
configuration, ``sweep`` writes the rate-grid CSV, ``verify`` runs the
named self-checks, and ``convergence`` writes the small-rate and
large-system convergence series.  Every number is printed with 17
significant digits so output round-trips to the exact binary value, and
identical invocations produce identical bytes.

Exit codes: 0 success, 1 at least one verification check failed, 2
invalid parameters, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from .bernoulli_gap import (
    UNIFORM_BINARY,
    BernoulliPairParams,
    bernoulli_channel,
    gap_report,
    sweep_heatmap,
    taylor_convergence_check,
    taylor_gap_closed_form,
    write_sweep_csv,
)
from .checks import CHECK_ORDER, run_checks
from .community import SbmParams, quadratic_form_at_zero
from .errors import InfogapError, ValidationError


def render_json(value, indent: int = 0) -> str:
    """Serialize to JSON text with every float at 17 significant digits.

    The stock serializer prints shortest-repr floats, which are already
    exact, but their digit count varies; fixed 17-digit formatting keeps
    column-for-column diffs stable across runs and platforms.
    """
    pad = " " * indent
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return format(v, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {render_json(v, indent + 2)}"
            for k, v in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(f"{pad}  {render_json(v, indent + 2)}" for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    raise ValidationError(f"cannot serialize {type(value).__name__} to JSON")


def _emit(payload, out_path: str | None) -> None:
    text = render_json(payload) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def cmd_gap(args: argparse.Namespace) -> int:
    params = BernoulliPairParams(args.p0, args.p1, args.q0, args.q1, args.epsilon)
    P1 = bernoulli_channel(params.epsilon * params.p0, params.epsilon * params.p1)
    P2 = bernoulli_channel(params.epsilon * params.q0, params.epsilon * params.q1)
    report = gap_report(UNIFORM_BINARY, P1, P2, precision=args.precision)
    _emit(asdict(report), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.points < 1:
        raise ValidationError("--points must be at least 1")
    if not (args.stop > args.start >= 0):
        raise ValidationError("need 0 <= --start < --stop")
    grid = [float(v) for v in np.linspace(args.start, args.stop, args.points)]
    rows = sweep_heatmap(grid, grid, args.epsilon)
    write_sweep_csv(rows, args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_checks(only=args.only, perturb_j=args.perturb_j)
    payload = [asdict(r) for r in results]
    _emit(payload, args.out)
    return 0 if all(r.passed for r in results) else 1


def cmd_convergence(args: argparse.Namespace) -> int:
    eps_rows = taylor_convergence_check(args.p0, args.p1, args.eps)
    limit = taylor_gap_closed_form(args.p0, args.p1)
    size_rows = []
    for n in args.n_list:
        value = quadratic_form_at_zero(SbmParams(args.p0, args.p1, n, 0.0, 0.0))
        size_rows.append(
            {
                "n": n,
                "quadratic_form": value,
                "limit": limit,
                "rel_error": abs(value - limit) / abs(limit),
            }
        )
    payload = {
        "p0": args.p0,
        "p1": args.p1,
        "epsilon_series": [asdict(r) for r in eps_rows],
        "system_size_series": size_rows,
    }
    _emit(payload, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infogap",
        description="Exact mutual-information gaps for paired Bernoulli channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gap = sub.add_parser("gap", help="pairwise MI report for one configuration")
    gap.add_argument("--p0", type=float, required=True)
    gap.add_argument("--p1", type=float, required=True)
    gap.add_argument("--q0", type=float, required=True)
    gap.add_argument("--q1", type=float, required=True)
    gap.add_argument("--epsilon", type=float, default=1.0)
    gap.add_argument("--precision", choices=("double", "extended"), default="double")
    gap.add_argument("--out", default=None, help="write JSON here instead of stdout")
    gap.set_defaults(func=cmd_gap)

    sweep = sub.add_parser("sweep", help="rate-grid CSV of the mirrored-channel gap")
    sweep.add_argument("--start", type=float, default=0.0)
    sweep.add_argument("--stop", type=float, default=1.0)
    sweep.add_argument("--points", type=int, default=101, help="grid points per axis")
    sweep.add_argument("--epsilon", type=float, default=1.0)
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="run the named self-checks")
    verify.add_argument(
        "--only",
        action="append",
        choices=CHECK_ORDER,
        default=None,
        help="run a single named check; repeat the flag for several",
    )
    verify.add_argument("--perturb-j", action="store_true", help=argparse.SUPPRESS)
    verify.add_argument("--out", default=None, help="write JSON here instead of stdout")
    verify.set_defaults(func=cmd_verify)

    conv = sub.add_parser(
        "convergence", help="small-rate and large-system convergence series"
    )
    conv.add_argument("--p0", type=float, required=True)
    conv.add_argument("--p1", type=float, required=True)
    conv.add_argument(
        "--eps", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3], metavar="EPS"
    )
    conv.add_argument(
        "--n-list", type=int, nargs="+", default=[100, 1000, 10000], metavar="N"
    )
    conv.add_argument("--out", default=None, help="write JSON here instead of stdout")
    conv.set_defaults(func=cmd_convergence)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfogapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
