"""Drift and Nystrom-error experiments and their CSV output."""
from __future__ import annotations

import csv
import enum
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import ikpca, nystrom
from .datasets import DatasetKind, load_dataset
from .kernels import KernelConfig, kernel_matrix, median_bandwidth
from .metrics import drift_report, nystrom_error
from .rng import Xoshiro256StarStar

DRIFT_COLUMNS = ("run", "m", "frobenius", "spectral", "trace", "orthogonality", "excluded")
NYSTROM_COLUMNS = ("run", "m", "frobenius", "spectral", "trace")
MEAN_RUN = "mean"


class ExperimentMode(str, enum.Enum):
    DRIFT_ZERO = "drift-zero"
    DRIFT_CENTERED = "drift-centered"
    NYSTROM = "nystrom"


@dataclass
class ExperimentConfig:
    dataset_path: Optional[str] = None
    dataset_kind: DatasetKind = DatasetKind.CSV
    mode: ExperimentMode = ExperimentMode.DRIFT_CENTERED
    max_points: int = 1000
    runs: int = 1
    seed: int = 0
    sigma_override: Optional[float] = None
    heuristic_sample: int = 1000
    output_path: Optional[str] = None
    bootstrap: int = 20
    sequential: bool = False

    def __post_init__(self):
        self.dataset_kind = DatasetKind(self.dataset_kind)
        self.mode = ExperimentMode(self.mode)
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.bootstrap < 1 or (self.mode is ExperimentMode.DRIFT_CENTERED and self.bootstrap < 2):
            raise ValueError("bootstrap batch is too small for this mode")
        if self.max_points < self.bootstrap:
            raise ValueError("max_points must be at least the bootstrap size")
        if self.heuristic_sample < 2:
            raise ValueError("heuristic_sample must be at least 2")
        if self.sigma_override is not None and not self.sigma_override > 0:
            raise ValueError("sigma must be positive")


@dataclass
class ResultTable:
    columns: tuple
    rows: list = field(default_factory=list)


def choose_sigma(cfg: ExperimentConfig, data) -> float:
    if cfg.sigma_override is not None:
        return float(cfg.sigma_override)
    return median_bandwidth(data[: cfg.heuristic_sample])


def _order(cfg: ExperimentConfig, n: int, run: int):
    if cfg.sequential:
        return list(range(n))
    return Xoshiro256StarStar(cfg.seed + run).permutation(n)


def _with_means(columns, rows):
    """Per-run rows sorted by (run, m), then one mean row per m."""
    rows = sorted(rows, key=lambda r: (r[0], r[1]))
    by_m = defaultdict(list)
    for row in rows:
        by_m[row[1]].append(row)
    means = []
    for m in sorted(by_m):
        group = by_m[m]
        means.append(
            (MEAN_RUN, m) + tuple(float(np.mean([r[c] for r in group])) for c in range(2, len(columns)))
        )
    return ResultTable(columns, rows + means)


def _require_data(cfg, data):
    if data is not None:
        return np.asarray(data, dtype=float)
    if cfg.dataset_path is None:
        raise ValueError("no dataset supplied")
    return load_dataset(cfg.dataset_path, cfg.dataset_kind)


def run_drift_experiment(
    cfg: ExperimentConfig,
    data=None,
    on_step: Optional[Callable[[int, ikpca.IkpcaState], None]] = None,
) -> ResultTable:
    """Stream shuffled points into an incremental decomposition, recording drift.

    One row is recorded right after the batch bootstrap and one after every
    accepted point.  ``on_step(run, state)`` is called for each recorded row.
    """
    data = _require_data(cfg, data)
    if data.shape[0] < cfg.bootstrap:
        raise ValueError("dataset is smaller than the bootstrap batch")
    kernel = KernelConfig(choose_sigma(cfg, data))
    mode = ikpca.Mode.CENTERED if cfg.mode is ExperimentMode.DRIFT_CENTERED else ikpca.Mode.ZERO_MEAN
    rows = []
    for run in range(cfg.runs):
        order = _order(cfg, data.shape[0], run)
        state = ikpca.init_batch(kernel, data[order[: cfg.bootstrap]], mode)

        def record():
            norms = drift_report(state)
            rows.append((run, state.m) + tuple(norms) + (ikpca.orthogonality_error(state), len(state.excluded)))
            if on_step is not None:
                on_step(run, state)

        record()
        for idx in order[cfg.bootstrap:]:
            if state.m >= cfg.max_points:
                break
            before = state.m
            state = ikpca.add_point(state, data[idx])
            if state.m > before:
                record()
    return _with_means(DRIFT_COLUMNS, rows)


def run_nystrom_experiment(
    cfg: ExperimentConfig,
    data=None,
    on_step: Optional[Callable[[int, nystrom.NystromState], None]] = None,
) -> ResultTable:
    """Grow the landmark set over the first ``max_points`` rows, recording ``K - K~``."""
    data = _require_data(cfg, data)[: cfg.max_points]
    n = data.shape[0]
    if n < cfg.bootstrap:
        raise ValueError("dataset is smaller than the bootstrap batch")
    kernel = KernelConfig(choose_sigma(cfg, data))
    k_full = kernel_matrix(kernel, data)
    rows = []
    for run in range(cfg.runs):
        order = _order(cfg, n, run)
        state = nystrom.nystrom_init_batch(kernel, data, order[: cfg.bootstrap])

        def record():
            rows.append((run, state.m) + tuple(nystrom_error(state, k_full)))
            if on_step is not None:
                on_step(run, state)

        record()
        for idx in order[cfg.bootstrap:]:
            state, accepted = nystrom.add_landmark(state, idx)
            if accepted:
                record()
    return _with_means(NYSTROM_COLUMNS, rows)


def run_experiment(cfg: ExperimentConfig, data=None) -> ResultTable:
    if cfg.mode is ExperimentMode.NYSTROM:
        return run_nystrom_experiment(cfg, data)
    return run_drift_experiment(cfg, data)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit_csv(table: ResultTable, path) -> None:
    """Write header and rows with LF line endings and 17 significant digits."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def _parse_cell(column: str, text: str):
    if column == "run":
        return text if text == MEAN_RUN else int(text)
    if column in ("m", "excluded"):
        try:
            return int(text)
        except ValueError:
            return float(text)
    return float(text)


def read_csv(path) -> ResultTable:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        columns = tuple(next(reader))
        rows = [tuple(_parse_cell(c, t) for c, t in zip(columns, rec)) for rec in reader]
    return ResultTable(columns, rows)
