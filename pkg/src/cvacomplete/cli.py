"""Command line entry point ``cvacomplete``.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .credit import bootstrap_hazard
from .curves import PAYER, RECEIVER, SIDES, atm_swap, flat_curve
from .errors import ConfigError, InputError, NumericalError
from .funding import CONSTANT_AVERAGE, DECOMPOSED, FLAT, funding_report, median_bank_cds, scarcity_spread
from .goodwill import AMORTIZING, MODELS, GoodwillModel, goodwill_cva, goodwill_sweep
from .oracle import SimConfig, validate_approximation
from .snapshot import (DEFAULT_PREMIUM_FREQUENCY, DEFAULT_RECOVERY, DEFAULT_ROLL_TENOR, dump_json, format_value,
                       load_cds, load_curve, load_snapshot, write_table)
from .study import (DEFAULT_HEADLINE_MATURITY, DEFAULT_SWAP_MATURITIES, funding_curve_for, funding_rows_table,
                    parse_sweep, run_paper_study)

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2
DEFAULT_SEED = 20100916


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _sweep(text: str) -> list[float]:
    try:
        return parse_sweep(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _report_config(args, snapshot=None) -> None:
    """Effective settings and where each came from (flag > meta.json > default)."""
    items = []
    if snapshot is not None:
        for key, (value, origin) in sorted(snapshot.settings.items()):
            items.append(f"{key}={value} ({origin})")
    else:
        rec = getattr(args, "recovery", None)
        items.append(f"recovery={rec if rec is not None else DEFAULT_RECOVERY} "
                     f"({'flag' if rec is not None else 'default'})")
    items.append(f"seed={args.seed}")
    items.append("day_count=ACT/365F")
    print("config: " + ", ".join(items), file=sys.stderr)


def _emit_table(args, name: str, columns, rows) -> None:
    if args.out:
        path = write_table(Path(args.out) / name, columns, rows)
        print(f"wrote {path}", file=sys.stderr)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def _market_inputs(args):
    """(credit curve, discount curve, snapshot or None) from --snapshot or --cds/--curve."""
    if args.snapshot:
        snap = load_snapshot(args.snapshot, recovery=args.recovery)
        _report_config(args, snap)
        return snap.credit, snap.discount_curve, snap
    if not args.cds:
        raise ConfigError("give --snapshot or --cds (with optional --curve)")
    _report_config(args)
    disc = load_curve(args.curve, "overnight") if args.curve else flat_curve(0.0, "zero")
    recovery = DEFAULT_RECOVERY if args.recovery is None else args.recovery
    quotes = load_cds(args.cds, recovery, args.frequency)
    return bootstrap_hazard(quotes, disc), disc, None


def cmd_bootstrap(args) -> int:
    credit, _, _ = _market_inputs(args)
    rows = [[float(t), float(h), credit.survival(float(t))] for t, h in zip(credit.times, credit.hazards)]
    _emit_table(args, "hazard.csv", ("time_years", "hazard", "survival"), rows)
    return EXIT_OK


def cmd_goodwill(args) -> int:
    credit, disc, _ = _market_inputs(args)
    if args.model == AMORTIZING:
        amort = args.amortization if args.amortization is not None else args.horizon
        if args.sweep is None and amort is None:
            raise ConfigError("amortizing model needs --amortization or --horizon")
    elif args.sweep is None and args.horizon is None:
        raise ConfigError(f"{args.model} model needs --horizon")

    if args.sweep is not None:
        fixed = args.horizon if args.model == AMORTIZING and args.fixed_horizon else None
        if args.fixed_horizon and fixed is None:
            raise ConfigError("--fixed-horizon needs --horizon and the amortizing model")
        points = goodwill_sweep(args.model, credit, disc, args.sweep, horizon=fixed)
        _emit_table(args, "goodwill_cva.csv", ("maturity_years", "cva_fraction"), points)
        last = points[-1][0]
        if args.model == AMORTIZING:
            model = GoodwillModel.amortizing(args.goodwill, args.amortization if args.amortization is not None else last)
            horizon = fixed
        else:
            model = GoodwillModel(args.model, args.goodwill)
            horizon = args.horizon if args.horizon is not None else last
    else:
        if args.model == AMORTIZING:
            model = GoodwillModel.amortizing(args.goodwill, amort)
        else:
            model = GoodwillModel(args.model, args.goodwill)
        horizon = args.horizon

    result = goodwill_cva(model, credit, disc, horizon)
    summary = {"model": args.model, "goodwill": args.goodwill, "cva": result.cva,
               "cva_fraction": result.cva_fraction, "horizon": result.horizon_used}
    if model.amortization is not None:
        summary["amortization"] = model.amortization
    text = dump_json(summary, Path(args.out) / "goodwill_summary.json" if args.out else None)
    if args.out or args.sweep is None:
        sys.stdout.write(text)
    return EXIT_OK


def _funding_spec(text: str) -> tuple[str, Optional[float], Optional[float]]:
    if text in (FLAT, DECOMPOSED):
        return text, None, None
    if text.startswith("constant:"):
        values = _floats(text.split(":", 1)[1])
        if len(values) not in (1, 2):
            raise argparse.ArgumentTypeError("constant funding takes one or two bps values")
        old = values[0] * 1e-4
        new = values[-1] * 1e-4
        return CONSTANT_AVERAGE, old, new
    if text == "constant":
        return CONSTANT_AVERAGE, None, None
    raise argparse.ArgumentTypeError(f"funding must be flat, decomposed or constant:<bps>, got {text!r}")


def _swap_maturities(args) -> list[float]:
    if args.sweep_maturities:
        maturities = args.sweep_maturities
    elif args.maturity is not None:
        maturities = [args.maturity]
    else:
        return list(DEFAULT_SWAP_MATURITIES)
    if any(not m > 0.0 for m in maturities):
        raise ConfigError(f"swap maturities must be positive, got {maturities}")
    return maturities


def _roll_tenor(args) -> Optional[float]:
    if args.tenor is not None and args.roll is not None and args.tenor != args.roll:
        raise ConfigError(f"--roll ({args.roll}) must equal --tenor ({args.tenor}): funding rolls on coupon dates")
    return args.tenor if args.tenor is not None else args.roll


def cmd_swap(args) -> int:
    tau = _roll_tenor(args)
    mode, spread_old, spread_new = args.funding
    sides = SIDES if args.side == "both" else (args.side,)
    maturities = _swap_maturities(args)
    horizon = max(maturities)
    if args.snapshot_old or args.snapshot_new:
        if not (args.snapshot_old and args.snapshot_new):
            raise ConfigError("a change report needs both --snapshot-old and --snapshot-new")
        old = load_snapshot(args.snapshot_old, args.recovery, tau)
        new = load_snapshot(args.snapshot_new, args.recovery, tau)
        _report_config(args, old)
        rows = funding_report(maturities, old,
                              funding_curve_for(old, mode, horizon, spread_old, args.discounted_premium),
                              new, funding_curve_for(new, mode, horizon, spread_new, args.discounted_premium),
                              sides=sides, atm_only=args.atm_only)
    else:
        if not args.snapshot:
            raise ConfigError("give --snapshot, or --snapshot-old and --snapshot-new")
        snap = load_snapshot(args.snapshot, args.recovery, tau)
        _report_config(args, snap)
        funding = funding_curve_for(snap, mode, horizon, spread_old, args.discounted_premium)
        rows = funding_report(maturities, snap, funding, sides=sides, atm_only=args.atm_only)
    columns, values = funding_rows_table(rows)
    name = "swap_funding.csv" if args.command == "swap-funding" else "swap_cva.csv"
    _emit_table(args, name, columns, values)
    return EXIT_OK


def cmd_scarcity(args) -> int:
    fixings = []
    if args.deposit is not None or args.overnight is not None:
        if args.deposit is None or args.overnight is None:
            raise ConfigError("--deposit and --overnight go together")
        fixings.append((args.tenor, args.deposit, args.overnight))
    elif args.snapshot:
        snap = load_snapshot(args.snapshot, args.recovery)
        _report_config(args, snap)
        fixings = snap.fixings or []
    if not fixings:
        raise ConfigError("no deposit/overnight fixings: use --deposit/--overnight or a snapshot with fixings.csv")
    if not args.bank_cds:
        raise ConfigError("--bank-cds is required")
    n_best = args.n_best if args.n_best is not None else min(10, len(args.bank_cds))
    credit = median_bank_cds([s * 1e-4 for s in args.bank_cds], n_best)
    rows = []
    for tenor, deposit, overnight in fixings:
        parts = scarcity_spread(deposit, overnight, credit)
        rows.append([tenor, parts.funding_spread * 1e4, parts.credit_spread * 1e4, parts.scarcity_spread * 1e4])
    _emit_table(args, "scarcity.csv",
                ("tenor_years", "funding_spread_bps", "credit_spread_bps", "scarcity_spread_bps"), rows)
    return EXIT_OK


def cmd_validate(args) -> int:
    tau = _roll_tenor(args)
    snap = load_snapshot(args.snapshot, args.recovery, tau)
    _report_config(args, snap)
    mode, spread, _ = args.funding
    side = RECEIVER if args.side == "both" else args.side
    spec = atm_swap(snap.curves, args.maturity, snap.roll_tenor, side)
    funding = funding_curve_for(snap, mode, args.maturity, spread)
    cfg = SimConfig(n_paths=args.paths, seed=args.seed, correlation=args.correlation,
                    rate_vol=args.rate_vol, spread_vol=args.spread_vol)
    result = validate_approximation(spec, snap.curves, funding, cfg, side)
    text = dump_json(result, Path(args.out) / "validate.json" if args.out else None)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_paper_study(args) -> int:
    if not args.out:
        raise ConfigError("paper-study needs --out")
    old = load_snapshot(args.snapshot_old, args.recovery)
    new = load_snapshot(args.snapshot_new, args.recovery)
    _report_config(args, old)
    summary = run_paper_study(old, new, args.goodwill, args.benefit, args.out, model=args.model,
                              sweep=args.sweep, swap_maturities=_swap_maturities(args),
                              headline_maturity=args.headline_maturity, atm_only=args.atm_only)
    for note in summary["notes"]:
        print(f"note: {note}", file=sys.stderr)
    sys.stdout.write(dump_json(summary))
    return EXIT_OK


def _common_args() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--snapshot", help="snapshot directory or bundled label (2008YE, 2009Q1)")
    common.add_argument("--out", help="output directory; tables go to stdout when omitted")
    common.add_argument("--recovery", type=float, help="CDS recovery (default: meta.json, else 0.40)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Monte Carlo seed (u64)")
    return common


def _market_args() -> argparse.ArgumentParser:
    market = _Parser(add_help=False)
    market.add_argument("--cds", help="CDS quote CSV (maturity_years,spread_bps)")
    market.add_argument("--curve", help="discount curve CSV (time_years,zero_rate); zero rates if omitted")
    market.add_argument("--frequency", type=int, default=DEFAULT_PREMIUM_FREQUENCY,
                        help="CDS premium payments per year")
    return market


def _swap_args() -> argparse.ArgumentParser:
    swaps = _Parser(add_help=False)
    swaps.add_argument("--tenor", type=float, help=f"coupon tenor in years (default {DEFAULT_ROLL_TENOR})")
    swaps.add_argument("--roll", type=float, help="funding roll tenor; must equal --tenor")
    swaps.add_argument("--maturity", type=float, help="single swap length in years")
    swaps.add_argument("--sweep-maturities", type=_floats, help="comma-separated swap lengths")
    swaps.add_argument("--side", choices=(PAYER, RECEIVER, "both"), default="both")
    swaps.add_argument("--funding", type=_funding_spec, default=(FLAT, None, None),
                       help="flat | decomposed | constant:<bps>[,<bps new>]")
    swaps.add_argument("--atm-only", action="store_true", help="ignore the smile, use ATM vols")
    swaps.add_argument("--discounted-premium", action="store_true",
                       help="discount the forward CDS premium leg (decomposed funding)")
    return swaps


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvacomplete", description="CVA on unbooked positions: Goodwill and collateral funding.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bootstrap", parents=[_common_args(), _market_args()],
                       help="print the bootstrapped hazard curve")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("goodwill-cva", parents=[_common_args(), _market_args()], help="CVA on Goodwill")
    p.add_argument("--goodwill", type=float, default=1.0, help="current Goodwill value")
    p.add_argument("--model", choices=MODELS, default=AMORTIZING)
    p.add_argument("--horizon", type=float, help="CVA horizon T (amortizing: defaults to the amortization M)")
    p.add_argument("--amortization", type=float, help="amortization horizon M (amortizing model)")
    p.add_argument("--sweep", type=_sweep, help="min:max:step over M (amortizing) or T")
    p.add_argument("--fixed-horizon", action="store_true",
                   help="with --sweep and the amortizing model, keep T = --horizon instead of T = M")
    p.set_defaults(func=cmd_goodwill)

    for name, text in (("swap-funding", "funding cost of collateralized ATM swaps"),
                       ("swap-cva", "own-default CVA on that funding")):
        p = sub.add_parser(name, parents=[_common_args(), _swap_args()], help=text)
        p.add_argument("--snapshot-old", help="earlier snapshot for a change report")
        p.add_argument("--snapshot-new", help="later snapshot for a change report")
        p.set_defaults(func=cmd_swap)

    p = sub.add_parser("scarcity", parents=[_common_args()],
                       help="split funding spread into credit and scarcity")
    p.add_argument("--deposit", type=float, help="deposit (or Euribor) rate, decimal")
    p.add_argument("--overnight", type=float, help="overnight index rate of the same tenor, decimal")
    p.add_argument("--tenor", type=float, default=0.5)
    p.add_argument("--bank-cds", type=_floats, help="comma-separated bank CDS spreads in bps")
    p.add_argument("--n-best", type=int, help="number of tightest banks (default: 10, or all if fewer)")
    p.set_defaults(func=cmd_scarcity)

    p = sub.add_parser("validate", parents=[_common_args(), _swap_args()],
                       help="Monte Carlo check of the funding approximation")
    p.set_defaults(snapshot="2008YE", maturity=10.0, side=RECEIVER)
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--correlation", type=float, default=0.0)
    p.add_argument("--spread-vol", type=float, default=0.0)
    p.add_argument("--rate-vol", type=float, default=0.20)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("paper-study", parents=[_common_args(), _swap_args()],
                       help="both case studies, 2008YE vs 2009Q1")
    p.set_defaults(snapshot_old="2008YE", snapshot_new="2009Q1")
    p.add_argument("--snapshot-old")
    p.add_argument("--snapshot-new")
    p.add_argument("--goodwill", type=float, default=26e9)
    p.add_argument("--benefit", type=float, default=2.5e9, help="reported derivative CVA benefit")
    p.add_argument("--model", choices=MODELS, default=AMORTIZING)
    p.add_argument("--sweep", type=_sweep, default=parse_sweep("5:30:1"))
    p.add_argument("--headline-maturity", type=float, default=DEFAULT_HEADLINE_MATURITY)
    p.set_defaults(func=cmd_paper_study)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
