"""Command-line front end: ``hyperdrones <experiment> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, run, write_outputs
from .geometry import ConfigurationError

DESCRIPTIONS = {
    "sample-map": "sample mobiles and gNBs and dump their positions",
    "isolation-sweep": "empirical isolated fraction against the level-sum bound",
    "regime-collapse": "coverage below the density threshold for several d_r",
    "drone-sweep": "drone totals against the series bound",
    "hop-histogram": "distribution of hop counts (drones + 1)",
    "garage-maps": "relays and surviving garages for each radius",
    "garage-curve": "garage count against the coverage radius",
    "garage-distance": "hop distance from mobiles to the closest garage",
    "bounds-table": "analytic bounds only, no sampling",
    "mellin-check": "level sum against its Mellin asymptotic",
}

# (flag, config key, argparse kwargs)
OPTIONS = [
    ("--config", None, dict(metavar="FILE", help="flat JSON file with configuration keys; flags override it")),
    ("--n", "n_values", dict(type=int, nargs="+", help="node counts n (key n_values)")),
    ("--d-f", "d_F", dict(type=float, help="fractal dimension of mobiles (key d_F); default 3")),
    ("--q", "q", dict(type=float, help="mobile level ratio q, instead of --d-f (key q)")),
    ("--d-r", "d_r", dict(type=float, help="fractal dimension of gNBs (key d_r)")),
    ("--p-prime", "p_prime", dict(type=float, help="gNB level parameter p', default 0.1 (key p_prime)")),
    ("--d-r-values", "d_r_values", dict(type=float, nargs="+", help="sweep several d_r (key d_r_values)")),
    ("--theta", "theta", dict(type=float, help="gNB intensity rho = n**theta (key theta)")),
    ("--theta-scale", "theta_scale", dict(type=float,
                                          help="theta = scale * d_r / 4, default 1.2 (key theta_scale)")),
    ("--rho", "rho", dict(type=float, help="fixed gNB intensity (key rho)")),
    ("--c", "c", dict(type=float, help="radio range R = c / sqrt(n), default sqrt(10) (key c)")),
    ("--depth", "depth", dict(type=int, help="grid depth U; default chosen automatically (key depth)")),
    ("--reps", "replications", dict(type=int, help="replications per parameter point, default 50 (key replications)")),
    ("--seed", "seed", dict(type=int, help="base seed, default 0 (key seed)")),
    ("--torus", "torus", dict(action="store_const", const=True, help="wrap the map into a torus (key torus)")),
    ("--radii", "radii", dict(type=float, nargs="+",
                              help="garage radii as multiples of R_n, default 5 10 20 40 80 (key radii)")),
    ("--order", "order", dict(choices=["by-index", "arbitrary", "by-seed-shuffle"],
                              help="relay elimination order (key order)")),
    ("--test-points", "test_points", dict(type=int, help="test points for garage checks (key test_points)")),
    ("--poisson", "poisson", dict(action="store_const", const=True,
                                  help="Poisson number of mobiles instead of exactly n (key poisson)")),
    ("--y", "y_values", dict(type=float, nargs="+", help="arguments y for mellin-check (key y_values)")),
    ("--out", "out", dict(help="output directory, default ./results (key out)")),
    ("--format", "format", dict(choices=["csv", "json"], help="rows as CSV (default) or inside the JSON (key format)")),
    ("--workers", "workers", dict(type=int, help="worker processes, default 1 (key workers)")),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdrones",
        description="Seeded experiments on hyperfractal maps with drone relays.",
        epilog="Outputs: <out>/<experiment>.csv with header experiment,params,rep,metric,value,seed "
               "and <out>/<experiment>.json with the configuration echo and summaries.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=DESCRIPTIONS[name], description=DESCRIPTIONS[name])
        for flag, key, kwargs in OPTIONS:
            p.add_argument(flag, dest=key or "config", default=None, **kwargs)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {key: getattr(args, key) for _, key, _ in OPTIONS if key is not None}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.config:
        return ExperimentConfig.from_file(args.config, experiment=args.experiment, **overrides)
    return ExperimentConfig(experiment=args.experiment, **overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ConfigurationError, TypeError, json.JSONDecodeError, OSError) as exc:
        print(f"hyperdrones: invalid configuration: {exc}", file=sys.stderr)
        return 2
    result = run(cfg)
    for path in write_outputs(result):
        print(path)
    for msg in result.summary["warnings"]:
        print(f"warning: {msg}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
