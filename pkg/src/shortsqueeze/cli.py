"""Command-line front end for clearing prices, thresholds, sweeps, and case studies.

Results go to standard output (or ``--out``); diagnostics go to standard
error. Exit codes: 0 success, 2 invalid input or file format, 1 solver
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analytic import (
    NoEquilibriumError,
    capital_threshold,
    realized_clearing_price,
    squeeze_limits,
    squeeze_threshold,
)
from .model import DomainError, MarketParams, require_valid
from .oracle import SolverError, enumerate_equilibria, fictitious_margin_call_solve
from .scenario import (
    FormatError,
    GridKind,
    SweepSpec,
    case_study,
    emit,
    load_snapshots,
    sweep,
)

# heuristic margin and impact levels used when flags are omitted
DEFAULT_ALPHA = 0.45
DEFAULT_MU = 0.30
DEFAULT_BETA = 2.0

ORACLE_REL_TOL = 1e-9


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("csv", "json"),
        default="csv",
        help="output format (default: csv)",
    )
    parser.add_argument(
        "--out",
        metavar="PATH",
        default=None,
        help="write output to PATH instead of standard output",
    )


def _add_param_flags(parser: argparse.ArgumentParser, *, with_s: bool) -> None:
    parser.add_argument(
        "--beta",
        type=float,
        default=DEFAULT_BETA,
        help=f"price impact per unit of ADV traded (default: {DEFAULT_BETA})",
    )
    parser.add_argument(
        "--alpha",
        type=float,
        default=DEFAULT_ALPHA,
        help=f"margin surplus ratio at the pre-event price (default: {DEFAULT_ALPHA})",
    )
    parser.add_argument(
        "--mu",
        type=float,
        default=DEFAULT_MU,
        help=f"maintenance margin ratio (default: {DEFAULT_MU})",
    )
    if with_s:
        parser.add_argument(
            "--s",
            type=float,
            required=True,
            help="short interest ratio (shares short / ADV)",
        )


def _params(args: argparse.Namespace, s: float | None = None) -> MarketParams:
    return MarketParams(
        beta=args.beta,
        s=args.s if s is None else s,
        alpha=args.alpha,
        mu=args.mu,
    )


def _cmd_clear(args: argparse.Namespace) -> tuple[str, int]:
    outcome = realized_clearing_price(args.c, _params(args))
    if args.oracle:
        check = fictitious_margin_call_solve(args.c, _params(args))
        rel = abs(outcome.price - check.price) / max(outcome.price, check.price)
        if rel > ORACLE_REL_TOL:
            raise SolverError(
                f"analytic price {outcome.price} and oracle price {check.price}"
                f" disagree by {rel:.3e} relative"
            )
        print(f"oracle price {check.price:.12g} agrees to {rel:.3e}", file=sys.stderr)
    return emit(outcome, args.format), 0


def _cmd_thresholds(args: argparse.Namespace) -> tuple[str, int]:
    if args.s is None:
        params = _params(args, s=0.0)
        require_valid(params)
        c_star = capital_threshold(params)
        s_star = squeeze_threshold(params)
        if args.format == "json":
            text = json.dumps({"c_star": c_star, "s_star": s_star}, indent=2) + "\n"
        else:
            text = f"c_star,s_star\n{c_star:.12g},{s_star:.12g}\n"
        return text, 0
    return emit(squeeze_limits(_params(args)), args.format), 0


def _cmd_sweep(args: argparse.Namespace) -> tuple[str, int]:
    spec = SweepSpec(
        c_min=args.c_min,
        c_max=args.c_max,
        n_points=args.n,
        grid=GridKind.UNIFORM_PLUS_THRESHOLD,
    )
    table = sweep(spec, _params(args))
    if args.plot:
        from .plots import save_sweep_figure

        save_sweep_figure(table, args.plot)
    return emit(table, args.format), 0


def _cmd_equilibria(args: argparse.Namespace) -> tuple[str, int]:
    return emit(enumerate_equilibria(args.c, _params(args)), args.format), 0


def _cmd_casestudy(args: argparse.Namespace) -> tuple[str, int]:
    snapshots, errors = load_snapshots(
        args.input,
        default_alpha=args.alpha,
        default_mu=args.mu,
        default_beta=args.beta,
    )
    for err in errors:
        print(f"warning: {args.input}: {err}", file=sys.stderr)
    reports = [case_study(snap) for snap in snapshots]
    if args.plot_dir:
        from .plots import save_case_study_figure

        out_dir = Path(args.plot_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, snap in enumerate(snapshots):
            name = snap.ticker or f"row{i + 1}"
            save_case_study_figure(snap, out_dir / f"{name}.png")
    # bad rows are warnings above, but they still mean the input was invalid
    return emit(reports, args.format), 2 if errors else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shortsqueeze",
        description=(
            "clearing prices and short squeeze thresholds for heavily"
            " shorted assets under margin calls"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    clear = sub.add_parser(
        "clear", help="realized clearing price for one capital level"
    )
    _add_param_flags(clear, with_s=True)
    clear.add_argument(
        "--c", type=float, required=True, help="external capital (fraction of ADV value)"
    )
    clear.add_argument(
        "--oracle",
        action="store_true",
        help="cross-check against the numeric solver; exit 1 on disagreement",
    )
    _add_common_flags(clear)
    clear.set_defaults(handler=_cmd_clear)

    thresholds = sub.add_parser(
        "thresholds", help="capital threshold, squeeze threshold, and jump size"
    )
    _add_param_flags(thresholds, with_s=False)
    thresholds.add_argument(
        "--s",
        type=float,
        default=None,
        help="short interest ratio; adds jump size and one-sided limits",
    )
    _add_common_flags(thresholds)
    thresholds.set_defaults(handler=_cmd_thresholds)

    swp = sub.add_parser("sweep", help="clearing price over a capital grid")
    _add_param_flags(swp, with_s=True)
    swp.add_argument("--c-min", type=float, required=True, help="grid start")
    swp.add_argument("--c-max", type=float, required=True, help="grid end")
    swp.add_argument("--n", type=int, default=101, help="grid points (default: 101)")
    swp.add_argument(
        "--plot", metavar="PATH", default=None, help="also render the sweep to PATH"
    )
    _add_common_flags(swp)
    swp.set_defaults(handler=_cmd_sweep)

    equilibria = sub.add_parser(
        "equilibria", help="every clearing price, not just the realized one"
    )
    _add_param_flags(equilibria, with_s=True)
    equilibria.add_argument(
        "--c", type=float, required=True, help="external capital (fraction of ADV value)"
    )
    _add_common_flags(equilibria)
    equilibria.set_defaults(handler=_cmd_equilibria)

    casestudy = sub.add_parser(
        "casestudy", help="squeeze reports for market snapshots from CSV"
    )
    casestudy.add_argument(
        "--input", required=True, help="snapshot CSV (see README for columns)"
    )
    _add_param_flags(casestudy, with_s=False)
    casestudy.add_argument(
        "--plot-dir",
        metavar="DIR",
        default=None,
        help="render one price figure per snapshot into DIR",
    )
    _add_common_flags(casestudy)
    casestudy.set_defaults(handler=_cmd_casestudy)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.handler(args)
    except (DomainError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, NoEquilibriumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
