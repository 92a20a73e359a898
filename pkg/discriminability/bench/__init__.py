"""Synthetic planted-feature data and the method comparison harness.

Planted columns are spread uniformly over a wide interval; all other
columns concentrate tightly around a point, with a few far outliers.
A useful ranking puts the planted columns first.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import dataclass_json

from ..approximation import (
    make_log_support_sequence,
    max_error_ratio,
    relative_support_length,
    score_features_bounded,
    true_error_ratio,
)
from ..baselines import BaselineEngine
from ..baselines.redundancy import default_discard_count
from ..models import DataMatrix, SelectionConfig, SelectionError, SweepPoint
from ..selection import fsd, lsfsd

logger = logging.getLogger(__name__)

OUTLIER_FRACTION = 0.001
SPREAD_WIDTH = (1.0, 3.0)
CONCENTRATION_LOG10_SCALE = (-3.0, -1.0)
OUTLIER_DISTANCE = (2.0, 5.0)


@dataclass
class SyntheticDataset:
    """Generated matrix plus the indices of its planted (well-spread) columns."""
    matrix: DataMatrix
    planted: List[int]
    seed: Optional[int]


def generate_synthetic(n: int, d: int, planted: int, seed: Optional[int]) -> SyntheticDataset:
    """Generate a dataset with ``planted`` spread columns among concentrated ones.

    Args:
        n: Rows (>= 2)
        d: Features (>= 1)
        planted: Number of spread columns (<= d)
        seed: Seed for numpy's default generator

    Returns:
        SyntheticDataset with ground-truth planted indices
    """
    if not 0 <= planted <= d:
        raise SelectionError(f"cannot plant {planted} of {d} features")
    if n < 2:
        raise SelectionError(f"need at least 2 rows, got {n}")

    rng = np.random.default_rng(seed)
    planted_indices = sorted(int(j) for j in rng.choice(d, size=planted, replace=False))
    is_planted = np.zeros(d, dtype=bool)
    is_planted[planted_indices] = True
    outliers = max(1, math.ceil(OUTLIER_FRACTION * n))

    values = np.empty((n, d), dtype=np.float64, order="F")
    for j in range(d):
        if is_planted[j]:
            low = rng.uniform(-1.0, 1.0)
            width = rng.uniform(*SPREAD_WIDTH)
            values[:, j] = rng.uniform(low, low + width, size=n)
        else:
            center = rng.uniform(-1.0, 1.0)
            scale = 10.0 ** rng.uniform(*CONCENTRATION_LOG10_SCALE)
            column = center + scale * rng.standard_normal(n)
            rows = rng.choice(n, size=min(outliers, n), replace=False)
            signs = rng.choice((-1.0, 1.0), size=rows.size)
            column[rows] = center + signs * rng.uniform(*OUTLIER_DISTANCE, size=rows.size)
            values[:, j] = column

    names = tuple(f"f{j}" for j in range(d))
    return SyntheticDataset(DataMatrix(values, names), planted_indices, seed)


def planted_recall(selected: Sequence[int], planted: Sequence[int]) -> Optional[float]:
    """Share of planted features among the selection; None without planted features."""
    if not planted:
        return None
    return len(set(selected) & set(planted)) / len(planted)


def baseline_seed(seed: int) -> int:
    """Seed for the random baseline, independent of the generator stream of ``seed``."""
    child = np.random.SeedSequence(seed).spawn(1)[0]
    return int(child.generate_state(1)[0])


def sweep_max_error(matrix: DataMatrix, relative_lengths: Sequence[float],
                    threads: Optional[int] = None,
                    feature_indices: Optional[Sequence[int]] = None) -> List[SweepPoint]:
    """Maximal error ratio for each relative support length."""
    points = []
    for relative_length in relative_lengths:
        requested = relative_support_length(matrix.n, relative_length)
        support = make_log_support_sequence(matrix.n, requested)
        bounds = score_features_bounded(matrix, support, feature_indices, threads)
        ratio = max_error_ratio(bounds)
        logger.info("r=%.3f l=%d (effective %d): max error ratio %.6f",
                    relative_length, requested, len(support), ratio)
        points.append(SweepPoint(relative_length, requested, len(support), ratio))
    return points


def average_sweeps(sweeps: Sequence[Sequence[SweepPoint]]) -> List[Tuple[float, float]]:
    """Mean maximal error ratio per relative length across several sweeps."""
    totals: Dict[float, List[float]] = {}
    for sweep in sweeps:
        for point in sweep:
            totals.setdefault(point.relative_length, []).append(point.max_error_ratio)
    return [(r, math.fsum(v) / len(v)) for r, v in sorted(totals.items())]


@dataclass_json
@dataclass
class BenchRow:
    """Outcome of one method on one generated dataset."""
    method: str
    seed: int
    recall: Optional[float]
    max_error_ratio: Optional[float] = None
    true_error_ratio: Optional[float] = None


@dataclass
class BenchResult:
    """All rows of a bench run plus wall-clock timings."""
    rows: List[BenchRow] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)

    def summary(self) -> Dict[str, Optional[float]]:
        """Mean recall per method (None when no planted features exist)."""
        by_method: Dict[str, List[float]] = {}
        for row in self.rows:
            by_method.setdefault(row.method, [])
            if row.recall is not None:
                by_method[row.method].append(row.recall)
        return {method: (math.fsum(r) / len(r) if r else None)
                for method, r in by_method.items()}


def run_bench(rows: int, features: int, planted: int, seeds: Sequence[int],
              relative_length: float, threads: Optional[int] = None,
              exact: bool = True) -> BenchResult:
    """Generate one dataset per seed and compare every method on it.

    Args:
        rows: Rows per dataset
        features: Features per dataset
        planted: Planted features per dataset; also the selection budget
        seeds: Generator seeds
        relative_length: Relative support length for LSFSD
        threads: Scoring threads
        exact: Also run exact FSD (quadratic in ``rows``)

    Returns:
        BenchResult with one row per (method, seed)
    """
    budget = max(1, planted)
    engine = BaselineEngine()
    engine.register_builtin_baselines()
    result = BenchResult()

    for seed in seeds:
        data = generate_synthetic(rows, features, planted, seed)
        matrix = data.matrix

        ranking = None
        if exact:
            started = time.perf_counter()
            ranking = fsd(matrix, SelectionConfig(budget=budget, threads=threads))
            result.timing[f"fsd/{seed}"] = time.perf_counter() - started
            result.rows.append(BenchRow("fsd", seed, planted_recall(ranking.top(budget), data.planted)))

        started = time.perf_counter()
        support_length = relative_support_length(rows, relative_length)
        approx, report = lsfsd(matrix, SelectionConfig(
            budget=budget, support_length=support_length, threads=threads,
        ))
        result.timing[f"lsfsd/{seed}"] = time.perf_counter() - started
        true_ratio = None
        if ranking is not None:
            true_ratio = true_error_ratio(ranking.scores, approx.ordered_features)
        result.rows.append(BenchRow("lsfsd", seed,
                                    planted_recall(approx.top(budget), data.planted),
                                    report.max_error_ratio, true_ratio))

        for name in ("random", "variance", "correlation", "rrfs"):
            started = time.perf_counter()
            params = {"seed": baseline_seed(seed) if name == "random" else seed}
            if name == "rrfs" and features >= 2:
                params["discard_correlated"] = default_discard_count(features)
            selection = engine.run(name, matrix, budget, **params)
            result.timing[f"{name}/{seed}"] = time.perf_counter() - started
            result.rows.append(BenchRow(name, seed, planted_recall(selection.selected, data.planted)))

    return result
