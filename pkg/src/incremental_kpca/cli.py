"""Command-line driver for the drift and Nystrom experiments.

Exit codes: 0 on success, 1 for configuration or input errors, 2 when the
computation fails numerically.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .datasets import DatasetError, DatasetKind
from .eigen_update import NumericalError
from .experiments import ExperimentConfig, ExperimentMode, emit_csv, run_experiment

log = logging.getLogger("incremental_kpca")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="incremental-kpca",
        description="Measure drift of incremental kernel PCA or the error of incremental Nystrom.",
    )
    p.add_argument("--dataset", required=True, help="input data file")
    p.add_argument("--kind", choices=[k.value for k in DatasetKind], default="csv")
    p.add_argument("--mode", choices=[m.value for m in ExperimentMode], default="drift-centered")
    p.add_argument("--max-points", type=int, default=1000)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=None, help="RBF bandwidth; median heuristic if omitted")
    p.add_argument("--heuristic-sample", type=int, default=1000)
    p.add_argument("--bootstrap", type=int, default=20, help="points decomposed in batch before streaming")
    p.add_argument("--sequential", action="store_true", help="use file order instead of a seeded shuffle")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = ExperimentConfig(
            dataset_path=args.dataset,
            dataset_kind=args.kind,
            mode=args.mode,
            max_points=args.max_points,
            runs=args.runs,
            seed=args.seed,
            sigma_override=args.sigma,
            heuristic_sample=args.heuristic_sample,
            output_path=args.out,
            bootstrap=args.bootstrap,
            sequential=args.sequential,
        )
        table = run_experiment(cfg)
        emit_csv(table, cfg.output_path)
    except (DatasetError, ValueError, OSError) as exc:
        log.error("error: %s", exc)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    log.info("wrote %d rows to %s", len(table.rows), cfg.output_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
