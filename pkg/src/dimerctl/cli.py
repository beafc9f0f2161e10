"""Command-line entry point: ``dimerctl <kind> --config FILE [options]``.

Exit codes: 0 success, 2 invalid configuration, 3 simulation failure,
4 I/O failure. On error one JSON object ``{"category": ..., "message": ...}``
is printed to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import KINDS, ConfigError, load_config
from .experiments import run_experiment
from .moments import NonFiniteStateError
from .ssa import SimulationError

EXIT_CONFIG, EXIT_SIMULATION, EXIT_IO = 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimerctl",
                                     description="Integral control of a stochastic "
                                                 "dimerization network")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", "-c", required=True, help="TOML experiment file")
        p.add_argument("--seed", type=int, help="override the RNG seed")
        p.add_argument("--out", "-o", help="override the output directory")
        p.add_argument("--n-cells", type=int, help="override the ensemble size")
    return parser


def _fail(category: str, message: str, code: int) -> int:
    print(json.dumps({"category": category, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config, kind=args.kind, seed=args.seed,
                             n_cells=args.n_cells, output_dir=args.out)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    try:
        paths = run_experiment(config)
    except (SimulationError, NonFiniteStateError) as exc:
        return _fail("simulation", f"{exc} (seed={config.seed})", EXIT_SIMULATION)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_IO)
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
