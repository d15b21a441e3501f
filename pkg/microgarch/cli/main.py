import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import structlog

import microgarch
from microgarch import engine, exc, presets
from microgarch.cli import io
from microgarch.cli.config import ExperimentConfig, config_path, load_config
from microgarch.cli.grid import parse_grid, parse_seeds
from microgarch.cli.render import render
from microgarch.garch import market_regime, representative_garch
from microgarch.log import configure_logging
from microgarch.stats import lemma
from microgarch.stats.report import StylizedFactsReport, evaluate_stylized_facts

LOG = structlog.get_logger(__name__)

DEFAULT_SIGMAS = "linspace(0.1, 1.5, 15)"

# flag destination -> (config section, config key)
_OVERRIDES: dict[str, tuple[str, str]] = {
    "rho": ("market", "rho"),
    "k": ("market", "k"),
    "s_liquidity": ("market", "s_liquidity"),
    "p1": ("market", "p1"),
    "p2": ("market", "p2"),
    "lam": ("market", "lambda"),
    "gamma": ("market", "gamma"),
    "g_fn": ("market", "g_fn"),
    "h_fn": ("market", "h_fn"),
    "length": ("simulation", "length"),
    "burn_in": ("simulation", "burn_in"),
    "seeds": ("simulation", "seeds"),
    "workers": ("simulation", "workers"),
    "significance": ("stats", "significance"),
    "lags": ("stats", "lags"),
    "ljung_box_lags": ("stats", "ljung_box_lags"),
    "output_dir": ("output", "directory"),
}


def _experiment_parser() -> argparse.ArgumentParser:
    """the flags shared by every subcommand that reads an experiment config"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--config",
        help="TOML experiment file (default: $MICROGARCH_CONFIG, else built-ins)",
    )

    market = parser.add_argument_group("market")
    market.add_argument("--rho", type=float)
    market.add_argument("--k", type=float)
    market.add_argument("--s-liquidity", dest="s_liquidity", type=float)
    market.add_argument("--p1", type=float)
    market.add_argument("--p2", type=float)
    market.add_argument("--lambda", dest="lam", type=float)
    market.add_argument("--gamma", type=float)
    market.add_argument("--g-fn", dest="g_fn")
    market.add_argument("--h-fn", dest="h_fn")

    sim = parser.add_argument_group("simulation")
    sim.add_argument("--length", type=int)
    sim.add_argument("--burn-in", dest="burn_in", type=int)
    sim.add_argument("--seeds", type=str, help="e.g. 1,2,3 or 0:29:1")
    sim.add_argument("--workers", type=int)

    stats = parser.add_argument_group("stats")
    stats.add_argument("--significance", type=float)
    stats.add_argument("--lags", type=str, help="e.g. 1,2,5")
    stats.add_argument("--ljung-box-lags", dest="ljung_box_lags", type=int)

    parser.add_argument("--output-dir", dest="output_dir")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, dict[str, Any]]:
    out: dict[str, dict[str, Any]] = {}
    for dest, (section, key) in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if dest in ("seeds", "lags"):
            value = parse_seeds(value)
        out.setdefault(section, {})[key] = value
    return out


def _experiment(args: argparse.Namespace) -> ExperimentConfig:
    return load_config(config_path(args.config), _overrides(args))


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    batch = engine.simulate_batch(
        cfg.market,
        cfg.length,
        cfg.seeds,
        burn_in=cfg.burn_in,
        workers=cfg.workers,
    )
    for series in batch:
        path = cfg.output_dir / f"{args.stem}_seed{series.seed}.csv"
        io.write_trajectory(series, path)
        print(path)
    return 0


def _print_stats(report: StylizedFactsReport, source: str) -> None:
    rows = [
        ("skewness", report.skewness),
        ("kurtosis", report.kurtosis),
        ("KS statistic", report.ks),
    ]
    rows += [
        (f"acf of r^2, lag {lag}", result)
        for lag, result in report.sq_autocorr.items()
    ]
    sys.stdout.write(render("stats.txt.j2", report=report, rows=rows, source=source))


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _experiment(args)

    def evaluate(series: engine.ReturnSeries) -> StylizedFactsReport:
        return evaluate_stylized_facts(
            series,
            cfg.significance,
            lags=cfg.lags,
            ljung_box_lags=cfg.ljung_box_lags,
        )

    if args.input is not None:
        source = Path(args.input)
        report = evaluate(io.read_returns(source))
        path = cfg.output_dir / f"{source.stem}.stats.toml"
        io.write_toml(dict(report.as_dict(), input=str(source)), path)
        _print_stats(report, str(source))
        return 0

    batch = engine.simulate_batch(
        cfg.market,
        cfg.length,
        cfg.seeds,
        burn_in=cfg.burn_in,
        workers=cfg.workers,
    )
    for series in batch:
        report = evaluate(series)
        path = cfg.output_dir / f"{args.stem}_seed{series.seed}.stats.toml"
        io.write_toml(dict(report.as_dict(), run=series.metadata()), path)
        _print_stats(report, f"simulation, seed {series.seed}")
    return 0


def cmd_garch_map(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    params = cfg.market
    regime = market_regime(params)
    garch = representative_garch(params)
    reduction = regime.reduction
    sys.stdout.write(
        render(
            "garch_map.txt.j2",
            regime=regime.value,
            garch=garch,
            margin=params.stationarity_margin,
            reduction=None if reduction is None else reduction.__name__,
        )
    )
    if args.output is not None:
        io.write_toml(
            {
                "regime": regime.value,
                "omega": garch.omega,
                "f": garch.f_value,
                "alpha": garch.alpha,
                "beta": garch.beta,
                "margin": params.stationarity_margin,
                "params": params.as_dict(),
            },
            Path(args.output),
        )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    values = parse_grid(args.values)
    report = engine.sweep(
        cfg.market,
        args.axis,
        values,
        cfg.length,
        cfg.seeds,
        burn_in=cfg.burn_in,
        significance=cfg.significance,
        workers=cfg.workers,
    )
    frame = report.to_frame()
    path = cfg.output_dir / f"sweep_{args.axis}.csv"
    io.write_frame(frame, path)
    sys.stdout.write(
        render(
            "sweep.txt.j2",
            axis=args.axis,
            runs=len(cfg.seeds),
            rows=frame.to_dict("records"),
        )
    )
    print(path)
    return 0


def cmd_verify_lemma(args: argparse.Namespace) -> int:
    report = lemma.verify_lemma_risk_monotonicity(
        args.utility,
        args.mu,
        parse_grid(args.sigmas),
        method=args.method,
        draws=args.draws,
        seed=args.seed,
    )
    sys.stdout.write(
        render(
            "lemma.txt.j2",
            report=report,
            points=list(zip(report.sigmas, report.expected)),
        )
    )
    return 0 if report.monotone else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress (-v) or everything (-vv) to stderr",
    )
    experiment = _experiment_parser()

    parser = argparse.ArgumentParser(
        prog="microgarch",
        description="Simulate the noise / fundamental / AI trader market and test the "
        "stylized facts of its returns.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {microgarch.__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate",
        parents=[common, experiment],
        help="simulate return series and write their trajectories as CSV",
    )
    p.add_argument("--stem", default="returns", help="file name prefix")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "stats",
        parents=[common, experiment],
        help="test a series for the stylized facts",
    )
    p.add_argument("--input", help="CSV of returns; simulate from the config if absent")
    p.add_argument("--stem", default="returns", help="file name prefix")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser(
        "garch-map",
        parents=[common, experiment],
        help="print the GARCH(1,1) parameters the market maps to",
    )
    p.add_argument("--output", help="also write the mapping as TOML")
    p.set_defaults(func=cmd_garch_map)

    p = sub.add_parser(
        "sweep",
        parents=[common, experiment],
        help="vary one parameter and report the mapping and the stylized facts",
    )
    p.add_argument(
        "--axis",
        required=True,
        choices=sorted(presets.sweep_axes),
    )
    p.add_argument(
        "--values", required=True, help="e.g. 0,0.2,0.4 or 0:0.6:0.2 or linspace(...)"
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "verify-lemma",
        parents=[common],
        help="check that expected utility falls as return risk grows",
    )
    p.add_argument(
        "--utility",
        default="exponential",
        help=f"one of {', '.join(lemma.catalog())}, optionally tag:arg",
    )
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigmas", default=DEFAULT_SIGMAS)
    p.add_argument("--method", choices=["quadrature", "qmc"], default="quadrature")
    p.add_argument("--draws", type=int, default=lemma.QMC_DRAWS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_lemma)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    configure_logging(args.verbose)
    log = LOG.bind(command=args.command)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except exc.BaseException as e:
        if args.verbose >= 2:
            log.exception("Command failed", ctx=e.ctx.as_dict())
        else:
            log.error("Command failed", error=str(e), ctx=e.ctx.as_dict())
        print(f"microgarch: error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
