"""Command-line entry point.

Commands run one task pipeline each on a JSON config:

    optfield solve    config.json   # eigenproblem (+ baseline if configured)
    optfield sweep    config.json   # parameter sweep to sweep.csv
    optfield wigner   config.json   # Wigner grid of the optimal state
    optfield evolve   config.json   # population time series
    optfield validate config.json   # parse and validate only

Exit codes: 0 success, 1 task failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, load_config
from .runner import run

COMMANDS = ("solve", "sweep", "wigner", "evolve", "validate")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optfield",
        description="Optimal initial field states for driving coupled quantum targets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} task")
        p.add_argument("config", help="path to a JSON config file")
        if name != "validate":
            p.add_argument("--out", help="output directory (overrides config)")
            p.add_argument("--threads", type=int, help="worker count for sweeps")
            p.add_argument(
                "--overwrite",
                action="store_true",
                help="allow replacing existing output files",
            )
            p.add_argument("--n-trunc", type=int, help="numerical truncation override")
            p.add_argument(
                "--seed",
                type=int,
                help="seed for stochastic refinements (core pipeline is deterministic)",
            )
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print("config ok")
        return 0

    if args.command == "solve":
        tasks = ["solve"] + (["baseline"] if "baseline" in config.tasks else [])
    else:
        tasks = [args.command]
    updates = {"tasks": tasks}
    if args.out is not None:
        updates["output_dir"] = args.out
    if args.threads is not None:
        updates["threads"] = args.threads
    if args.overwrite:
        updates["overwrite"] = True
    if args.n_trunc is not None:
        updates["n_trunc"] = args.n_trunc
    if args.seed is not None:
        updates["seed"] = args.seed
    config = replace(config, **updates)

    if args.command == "sweep" and not config.sweep:
        print("config error: sweep: the sweep task requires sweep.axes", file=sys.stderr)
        return 2

    return run(config)


if __name__ == "__main__":
    sys.exit(main())
