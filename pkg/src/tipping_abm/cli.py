"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, build_config, load_config
from .rng import RngStream

_CONFIG_KEY_DOCS = {
    "n_firms": "number of firms (positive integer)",
    "mu": "households per firm (positive real)",
    "c": "consumption propensity, in (0, 1]",
    "beta": "intensity of choice for demand and labor, >= 0",
    "gamma_p": "price adjustment amplitude, in [0, 1]",
    "gamma_y": "target-production adjustment amplitude (mark1), in [0, 1]",
    "gamma_w": "wage adjustment amplitude (mark0 extension), in [0, 1]",
    "eta_plus": "hiring propensity, in [0, 1]",
    "eta_minus": "firing propensity, in [0, 1]",
    "delta": "dividend fraction of positive profits, in [0, 1]",
    "delta_plus": "dividend-plus-reserves fraction (alternative mode), in [0, 1] or none",
    "theta": "bankruptcy threshold (debt-to-payroll); 'inf' disables defaults",
    "phi": "revival probability per step, in [0, 1]",
    "f": "household share of default costs, in [0, 1]",
    "rho0": "baseline interest rate (mark1), >= 0",
    "tau": "debt repayment fraction per step (mark1), in [0, 1]",
    "m_goods": "shops visited per household per step (mark1), positive integer",
    "horizon": "number of steps (positive integer)",
    "burn_in": "steps discarded by analysis tools, >= 0",
    "seed": "64-bit run seed",
    "policy": "accommodation rule 'u_trigger:theta_high', e.g. 0.1:10",
    "rate_noise": "re-enable the multiplicative noise on offered rates (mark1)",
}


def _config_epilog() -> str:
    lines = ["config file keys (same names as CLI --set KEY=VALUE):"]
    for key, doc in _CONFIG_KEY_DOCS.items():
        lines.append(f"  {key:<12} {doc}")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="tipping-abm",
        description="Macroeconomic ABM laboratory: engines, sweeps, analytics, oracles.",
        epilog=_config_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for engine in ("mark0", "mark1"):
        run_p = sub.add_parser(
            f"run-{engine}",
            help=f"run the {engine} engine and emit series.csv + manifest.json",
            epilog=_config_epilog(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        run_p.add_argument("--config", type=str, default=None, help="config file")
        run_p.add_argument("--seed", type=int, default=None, help="override seed")
        run_p.add_argument("--steps", type=int, default=None, help="override horizon")
        run_p.add_argument("--out", type=str, default=None, help="output directory")
        run_p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override any config key (repeatable)",
        )
        run_p.add_argument(
            "--backend",
            choices=["compiled", "python"],
            default=None,
            help="engine backend (default: compiled when available)",
        )

    sweep_p = sub.add_parser("sweep", help="run a phase-diagram sweep")
    sweep_p.add_argument("--spec", required=True, help="sweep spec file")
    sweep_p.add_argument("--out", required=True, help="output directory")
    sweep_p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker processes (default: TIPPING_ABM_WORKERS or CPU count)",
    )

    theory_p = sub.add_parser("theory", help="analytical oracles")
    theory_sub = theory_p.add_subparsers(dest="action", required=True)
    tc = theory_sub.add_parser("critical-r", help="closed-form and numeric R_c")
    tc.add_argument("--gamma-p", type=float, required=True)
    tc.add_argument("--beta", type=float, required=True)
    td = theory_sub.add_parser("density", help="stationary log-price density as CSV")
    td.add_argument("--gamma-p", type=float, required=True)
    td.add_argument("--beta", type=float, required=True)
    td.add_argument("--out", type=str, default=None, help="CSV path (default stdout)")
    tr = theory_sub.add_parser("reduced", help="reduced (lambda, z) simulation")
    tr.add_argument("--n", type=int, default=5000)
    tr.add_argument("--gamma-p", type=float, required=True)
    tr.add_argument("--beta", type=float, default=0.0)
    tr.add_argument("--eta-plus", type=float, required=True)
    tr.add_argument("--eta-minus", type=float, required=True)
    tr.add_argument("--steps", type=int, default=3000)
    tr.add_argument("--seed", type=int, default=0)
    to = theory_sub.add_parser("oscillator", help="schematic savings-price oscillator")
    to.add_argument("--n", type=int, default=10000)
    to.add_argument("--big-c", type=float, required=True, dest="big_c")
    to.add_argument("--steps", type=int, default=4000)
    to.add_argument("--seed", type=int, default=0)
    tm = theory_sub.add_parser("moment-map", help="closed moment-map approximations")
    tm.add_argument("--kind", choices=["simple", "linear"], required=True)
    tm.add_argument("--big-c", type=float, required=True, dest="big_c")
    tm.add_argument("--steps", type=int, default=5000)
    tf = theory_sub.add_parser("rep-firm", help="representative-firm reduction")
    tf.add_argument("--eta-plus", type=float, required=True)
    tf.add_argument("--eta-minus", type=float, required=True)
    tf.add_argument("--gamma", type=float, required=True)
    tf.add_argument("--steps", type=int, default=20000)
    tf.add_argument("--seed", type=int, default=0)
    tp = theory_sub.add_parser(
        "perturbative", help="master-equation fixed point vs first-order formula"
    )
    tp.add_argument("--gamma-p", type=float, required=True)

    cls_p = sub.add_parser("classify", help="phase verdict for an engine CSV")
    cls_p.add_argument("csv", help="series CSV (engine schema)")
    cls_p.add_argument("--burn-in", type=int, default=0)
    cls_p.add_argument("--fu-cutoff", type=float, default=None,
                       help="mean-u threshold for full unemployment (default 0.8)")
    cls_p.add_argument("--fe-cutoff", type=float, default=None,
                       help="mean-u threshold for full employment (default 0.05)")
    cls_p.add_argument("--crisis-amplitude", type=float, default=None,
                       help="swing threshold for the crisis phase (default 0.05)")

    rep_p = sub.add_parser("replay", help="re-run a manifest bit-identically")
    rep_p.add_argument("manifest", help="manifest.json or run directory")
    rep_p.add_argument("--out", type=str, default=None, help="CSV output path")

    return parser


def _overrides_from_args(args) -> dict:
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.steps is not None:
        overrides["horizon"] = args.steps
    return overrides


def _cmd_run(engine: str, args) -> int:
    overrides = _overrides_from_args(args)
    if args.config:
        config = load_config(args.config, engine, overrides)
    else:
        config = build_config({}, engine, overrides)
    from .runner import run_engine

    result = run_engine(engine, config, backend=args.backend)
    u = result.columns["u"]
    line = (
        f"{engine}: {result.n_steps} steps, termination="
        f"{result.manifest['termination']}, final u={u[-1]:.4f}"
        if len(u)
        else f"{engine}: 0 steps"
    )
    if args.out:
        csv_path, manifest_path = result.write(args.out)
        line += f", wrote {csv_path} and {manifest_path.name}"
    print(line)
    return 0


def _cmd_sweep(args) -> int:
    from .sweep import load_sweep_spec, run_sweep

    spec = load_sweep_spec(args.spec)
    phase_map = run_sweep(spec, workers=args.workers, out_dir=args.out)
    print(f"sweep: {len(phase_map.cells)} cells -> {Path(args.out) / 'phasemap.csv'}")
    return 0


def _cmd_theory(args) -> int:
    from . import theory

    if args.action == "critical-r":
        closed = theory.critical_R(args.gamma_p, args.beta, "closed")
        numeric = theory.critical_R(args.gamma_p, args.beta, "numeric")
        print(f"closed R_c = {closed!r}")
        print(f"numeric R_c = {numeric!r}")
    elif args.action == "density":
        grid = theory.stationary_density(args.gamma_p, args.beta)
        lines = ["lambda,density"]
        lines += [f"{x!r},{m!r}" for x, m in zip(grid.x, grid.mass)]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            print(f"wrote {args.out} ({grid.n_bins} bins)")
        else:
            sys.stdout.write(text)
    elif args.action == "reduced":
        res = theory.simulate_reduced(
            args.n, args.gamma_p, args.beta, args.eta_plus, args.eta_minus,
            args.steps, RngStream(args.seed),
        )
        print(
            f"verdict = {res.verdict}; mean lambda = {res.lambda_mean!r}; "
            f"final zbar = {res.zbar[-1]!r}"
        )
    elif args.action == "oscillator":
        res = theory.simulate_schematic_oscillator(
            args.n, args.big_c, args.steps, RngStream(args.seed)
        )
        print(f"sustained = {res.sustained}")
    elif args.action == "moment-map":
        if args.kind == "simple":
            out = theory.moment_map_simple(args.big_c, args.steps)
        else:
            out = theory.moment_map_linear(args.big_c, args.steps)
        print(f"verdict = {out['verdict']}")
    elif args.action == "rep-firm":
        out = theory.representative_firm(
            args.eta_plus, args.eta_minus, args.gamma, args.steps,
            RngStream(args.seed),
        )
        print(f"verdict = {out['verdict']}; final production = {out['y'][-1]!r}")
    elif args.action == "perturbative":
        dist = theory.perturbative_check(args.gamma_p)
        print(f"L1 distance = {dist!r}")
    return 0


def _cmd_classify(args) -> int:
    from . import analytics
    from .analytics import classify_phase, crisis_stats, power_spectrum
    from .results import read_series_csv

    cols = read_series_csv(args.csv)
    if "u" not in cols:
        raise ConfigError(f"{args.csv}: missing required column 'u'")
    u = cols["u"]
    thresholds = dict(
        fu_cutoff=args.fu_cutoff if args.fu_cutoff is not None else analytics.FU_CUTOFF,
        fe_cutoff=args.fe_cutoff if args.fe_cutoff is not None else analytics.FE_CUTOFF,
        crisis_amplitude=(
            args.crisis_amplitude
            if args.crisis_amplitude is not None
            else analytics.CRISIS_AMPLITUDE
        ),
    )
    stats = classify_phase(u, args.burn_in, **thresholds)
    peak = ""
    if len(u) - args.burn_in >= 2048:
        spectrum = power_spectrum(u, args.burn_in)
        if spectrum.peak_period is not None:
            peak = f"{spectrum.peak_period:.2f}"
    crises = crisis_stats(
        u, args.burn_in, crisis_amplitude=thresholds["crisis_amplitude"]
    )
    print(
        f"label={stats.label} u_mean={stats.u_mean!r} amplitude={stats.amplitude!r} "
        f"peak_period={peak or 'none'} crises={crises.count} "
        f"crisis_amplitude={crises.mean_amplitude!r} "
        f"crisis_interval={crises.mean_interval!r} "
        f"thresholds=fu:{thresholds['fu_cutoff']!r},fe:{thresholds['fe_cutoff']!r},"
        f"crisis:{thresholds['crisis_amplitude']!r}"
    )
    return 0


def _cmd_replay(args) -> int:
    from .runner import manifest_path_for, replay

    result = replay(manifest_path_for(args.manifest), out_csv=args.out)
    print(
        f"replayed {result.manifest['engine']}: {result.n_steps} steps"
        + (f", wrote {args.out}" if args.out else "")
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run-mark0":
            return _cmd_run("mark0", args)
        if args.command == "run-mark1":
            return _cmd_run("mark1", args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "theory":
            return _cmd_theory(args)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "replay":
            return _cmd_replay(args)
        parser.error(f"unknown command {args.command!r}")
        return 1
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures exit 2 with a message
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
