"""Exact partial diameters and discriminability scores.

For a feature f and a subset size k, phi(k, f) is the smallest spread
max |f(x) - f(y)| of any k data points. An optimal subset is always k
order-consecutive values, so on the sorted column phi is the narrowest
window of length k.
"""

import logging
import math
import os
from itertools import combinations
from multiprocessing.pool import ThreadPool
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from ..models import DataMatrix, FeatureScore, SelectionError, SortedFeature

logger = logging.getLogger(__name__)

T = TypeVar("T")

ORACLE_MAX_ROWS = 20


def available_threads() -> int:
    """Number of CPUs this process may run on."""
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def map_features(function: Callable[[int], T],
                 feature_indices: Iterable[int],
                 threads: Optional[int] = None) -> List[T]:
    """Apply ``function`` to every feature index, preserving input order.

    Args:
        function: Per-feature computation; must only read shared data
        feature_indices: Features to process
        threads: Worker count (None = available parallelism, 1 = serial)

    Returns:
        Results in the order of ``feature_indices``
    """
    indices = list(feature_indices)
    workers = available_threads() if threads is None else threads
    if workers < 1:
        raise SelectionError(f"thread count must be >= 1, got {workers}")
    workers = min(workers, len(indices))
    if workers <= 1:
        return [function(j) for j in indices]

    logger.debug("Scoring %d features on %d threads", len(indices), workers)
    with ThreadPool(processes=workers) as pool:
        return list(pool.imap(function, indices))


def sort_feature(matrix: DataMatrix, j: int) -> SortedFeature:
    """Return feature ``j`` of ``matrix`` in ascending order."""
    column = matrix.column(j)
    sorted_values = np.sort(column, kind="stable")
    sorted_values.setflags(write=False)
    return SortedFeature(feature_index=j, sorted_values=sorted_values)


def _check_subset_size(k: int, n: int) -> None:
    if not 2 <= k <= n:
        raise SelectionError(f"subset size k={k} outside 2..{n}")


def phi(sf: SortedFeature, k: int) -> float:
    """Partial diameter: width of the narrowest window of k sorted values."""
    values = sf.sorted_values
    n = sf.n
    _check_subset_size(k, n)
    return float(np.min(values[k - 1:] - values[:n - k + 1]))


def phi_profile(sf: SortedFeature, ks: Sequence[int]) -> np.ndarray:
    """Evaluate phi at every subset size in ``ks``.

    Args:
        sf: Sorted feature
        ks: Subset sizes, each in 2..n

    Returns:
        float64 array aligned with ``ks``
    """
    values = sf.sorted_values
    n = sf.n
    result = np.empty(len(ks), dtype=np.float64)
    for i, k in enumerate(ks):
        _check_subset_size(k, n)
        result[i] = np.min(values[k - 1:] - values[:n - k + 1])
    return result


def phi_oracle(column: Sequence[float], k: int) -> float:
    """Partial diameter by enumerating every k-subset. Test oracle only."""
    values = [float(v) for v in column]
    n = len(values)
    if n > ORACLE_MAX_ROWS:
        raise SelectionError(
            f"phi_oracle enumerates all subsets; n={n} exceeds {ORACLE_MAX_ROWS}"
        )
    _check_subset_size(k, n)
    return min(max(abs(x - y) for x, y in combinations(subset, 2))
               for subset in combinations(values, k))


def feature_discriminability(sf: SortedFeature) -> FeatureScore:
    """Exact discriminability, normalized discriminability and intrinsic dimension.

    Costs O(n^2) per feature; use the approximation module for large n.
    """
    n = sf.n
    ks = np.arange(2, n + 1)
    phis = phi_profile(sf, ks)
    delta_star = math.fsum(phis) / n
    delta = math.fsum(phis / ks) / n
    return FeatureScore.from_deltas(sf.feature_index, delta_star, delta)


def score_features(matrix: DataMatrix,
                   feature_indices: Optional[Iterable[int]] = None,
                   threads: Optional[int] = None) -> List[FeatureScore]:
    """Exact scores for the given features (all features by default)."""
    indices = range(matrix.d) if feature_indices is None else feature_indices
    return map_features(
        lambda j: feature_discriminability(sort_feature(matrix, j)),
        indices, threads,
    )


def max_phi_profile(matrix: DataMatrix, ks: Sequence[int],
                    threads: Optional[int] = None) -> np.ndarray:
    """Per-subset-size maximum of phi over all features."""
    profiles = map_features(lambda j: phi_profile(sort_feature(matrix, j), ks),
                            range(matrix.d), threads)
    return np.max(np.vstack(profiles), axis=0)


def dataset_discriminability(matrix: DataMatrix, threads: Optional[int] = None) -> float:
    """Discriminability of the whole dataset.

    The maximum over features is taken per subset size, inside the sum.
    """
    n = matrix.n
    ks = np.arange(2, n + 1)
    return math.fsum(max_phi_profile(matrix, ks, threads)) / n


def dataset_intrinsic_dimension(matrix: DataMatrix, threads: Optional[int] = None) -> float:
    """1 / discriminability^2 of the whole dataset (+inf when it is 0)."""
    delta = dataset_discriminability(matrix, threads)
    return math.inf if delta == 0.0 else 1.0 / (delta * delta)


def measure_subset_size(n: int, alpha: float) -> int:
    """Subset size ceil(n * (1 - alpha)) holding measure 1 - alpha, clamped to 2..n."""
    if not 0.0 <= alpha < 1.0:
        raise SelectionError(f"alpha must lie in [0, 1), got {alpha}")
    return min(n, max(2, math.ceil(n * (1.0 - alpha))))


def partial_diameter(sf: SortedFeature, alpha: float) -> float:
    """Smallest spread of any subset of measure 1 - alpha."""
    return phi(sf, measure_subset_size(sf.n, alpha))


def observable_diameter(matrix: DataMatrix, alpha: float,
                        threads: Optional[int] = None) -> float:
    """Largest partial diameter over all features at measure level 1 - alpha."""
    diameters = map_features(
        lambda j: partial_diameter(sort_feature(matrix, j), alpha),
        range(matrix.d), threads,
    )
    return max(diameters)
