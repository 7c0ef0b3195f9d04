"""Command-line interface.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 uncoverable
scenario in density design.
"""

import argparse
import contextlib
import logging
import sys
from dataclasses import replace

from . import __version__, experiments
from .config import load_config
from .coverage import Metric
from .errors import ConfigError, DomainError, NumericalError, UncoverableError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_UNCOVERABLE = 0, 2, 3, 4

ALL_ANALYTIC = [m.value for m in Metric]
SIMULATED = [Metric.ENERGY.value, Metric.SNR.value, Metric.JOINT.value]

logger = logging.getLogger("laseruav")


def _metrics_arg(text):
    names = [m.strip() for m in text.split(",") if m.strip()]
    for name in names:
        try:
            Metric(name)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown metric {name!r}; choose from {', '.join(ALL_ANALYTIC)}") from None
    return names


def _common(parser, engine_default="analytic"):
    parser.add_argument("--config", help="scenario file (key = value lines)")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    parser.add_argument("--iterations", type=int, help="Monte Carlo iterations")
    parser.add_argument("--workers", type=int, help="threads for Monte Carlo batches")
    parser.add_argument("--out", help="output file (default: standard output)")
    parser.add_argument("--engine", choices=("analytic", "montecarlo", "both"),
                        default=engine_default)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="laseruav",
        description="Coverage of laser-powered UAVs in a Poisson network of laser beam directors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="analytic coverage at the configured density")
    _common(p)
    p.add_argument("--metrics", type=_metrics_arg, default=ALL_ANALYTIC)

    p = sub.add_parser("montecarlo", help="Monte Carlo coverage at the configured density")
    _common(p, engine_default="montecarlo")
    p.add_argument("--metrics", type=_metrics_arg, default=SIMULATED)

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    _common(p)
    p.add_argument("--axis", required=True, choices=experiments.AXES)
    p.add_argument("--grid", required=True,
                   help="comma list, or lin:start:stop:num / log:start:stop:num")
    p.add_argument("--metrics", type=_metrics_arg, default=["joint"])

    p = sub.add_parser("density-design", help="minimum LBD density for a coverage target")
    _common(p)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--metric", choices=ALL_ANALYTIC, default="energy")

    for name, func in experiments.FIGURES.items():
        p = sub.add_parser(name, help=func.__doc__.splitlines()[0])
        _common(p)
    return parser


def _simulation(args, loaded):
    sim = loaded.simulation
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.iterations is not None:
        changes["iterations"] = args.iterations
    if args.workers is not None:
        changes["workers"] = args.workers
    return replace(sim, **changes)


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def run(args):
    loaded = load_config(args.config)
    for note in loaded.notes:
        logger.info("note: %s", note)
    scenario = loaded.scenario
    engines = experiments.resolve_engines(args.engine)
    uses_mc = "montecarlo" in engines
    simulation = _simulation(args, loaded) if uses_mc else None
    seed = simulation.seed if uses_mc else None
    manifest = experiments.RunManifest.create(args.command, loaded.fingerprint, seed)

    if args.command == "density-design":
        pairs = experiments.run_density_design(scenario, args.target, args.metric)
        with _output(args.out) as out:
            experiments.write_report(pairs, out, manifest, loaded.notes)
        return EXIT_OK

    if args.command == "analytic" or args.command == "montecarlo":
        rows = experiments.scenario_rows(scenario, args.metrics, engines, simulation)
        if "analytic" in engines:
            rows += experiments.analytic_extras(scenario)
    elif args.command == "sweep":
        grid = experiments.parse_grid(args.grid)
        rows = experiments.run_sweep(scenario, args.axis, grid, args.metrics, engines,
                                     simulation)
    else:
        rows = experiments.run_figure(args.command, scenario, engines, simulation)

    with _output(args.out) as out:
        experiments.write_csv(rows, out, manifest, loaded.notes)
    return EXIT_OK


def _configure_logging(verbose):
    # a handler on the package logger, replaced per call so repeated main() calls don't stack
    for handler in [h for h in logger.handlers if getattr(h, "_laseruav_cli", False)]:
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._laseruav_cli = True
    logger.addHandler(handler)
    logger.setLevel(logging.INFO if verbose else logging.WARNING)


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return run(args)
    except UncoverableError as exc:
        print(f"laseruav: uncoverable: {exc}", file=sys.stderr)
        return EXIT_UNCOVERABLE
    except NumericalError as exc:
        print(f"laseruav: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DomainError) as exc:
        print(f"laseruav: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
