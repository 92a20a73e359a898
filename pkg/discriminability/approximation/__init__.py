"""Support-sequence approximation of the normalized discriminability.

phi(k, f) is evaluated only at the points of a support sequence. Because
k -> phi(k, f) is nondecreasing, every skipped k between two support
points is bracketed by the phi values at those points, which yields a
lower and an upper bound on the exact score.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core import map_features, max_phi_profile, phi_profile, sort_feature
from ..models import (
    BoundedScore,
    DataMatrix,
    FeatureScore,
    Score,
    SelectionError,
    SortedFeature,
    SupportSequence,
)

logger = logging.getLogger(__name__)


def make_log_support_sequence(n: int, l: int) -> SupportSequence:
    """Build a log-spaced support sequence of (at most) ``l`` points for ``n`` rows.

    A geometric sequence running from n down to 2 is mirrored through
    k = n + 2 - s, which puts the dense end of the sequence at large k.
    Duplicates left by flooring are dropped, so the result can be shorter
    than ``l``. With ``l >= n - 1`` every subset size is a support point.
    """
    if n < 2:
        raise SelectionError(f"need at least 2 data points, got {n}")
    if l < 2:
        raise SelectionError(f"support length must be >= 2, got {l}")
    if l >= n - 1:
        return SupportSequence.full(n)

    geometric = np.geomspace(n, 2, num=l)
    # geomspace pins both endpoints, so the mirror yields exactly 2 and n.
    geometric[0], geometric[-1] = n, 2
    mirrored = np.floor(n + 2 - geometric).astype(np.int64)
    points = np.unique(mirrored)
    return SupportSequence(tuple(int(p) for p in points), n)


def relative_support_length(n: int, relative_length: float) -> int:
    """Map a relative length r to l = floor(r * n), never below 2."""
    if relative_length <= 0:
        raise SelectionError(f"relative length must be positive, got {relative_length}")
    length = math.floor(Fraction(repr(float(relative_length))) * n)
    if length < 2:
        logger.warning("Relative length %s gives l=%d for n=%d; using l=2",
                       relative_length, length, n)
        return 2
    return length


@dataclass(frozen=True)
class SupportLayout:
    """Per-sequence index arrays shared by every feature scored against it."""
    points: np.ndarray
    interior: np.ndarray
    left: np.ndarray
    right: np.ndarray
    n: int

    @classmethod
    def build(cls, s: SupportSequence) -> "SupportLayout":
        points = np.asarray(s.points, dtype=np.int64)
        interior = np.setdiff1d(np.arange(2, s.n + 1, dtype=np.int64), points,
                                assume_unique=True)
        right = np.searchsorted(points, interior)
        return cls(points=points, interior=interior, left=right - 1,
                   right=right, n=s.n)


def _bounded_from_layout(sf: SortedFeature, layout: SupportLayout) -> BoundedScore:
    if sf.n != layout.n:
        raise SelectionError(
            f"support sequence built for n={layout.n}, feature has n={sf.n}"
        )
    phis = phi_profile(sf, layout.points)
    lower, upper = _bracketed_sums(phis, layout)
    return BoundedScore.from_deltas(sf.feature_index, lower, upper)


def _bracketed_sums(phis: np.ndarray, layout: SupportLayout) -> Tuple[float, float]:
    # Each skipped term is phi(bracket) / j, summed directly with fsum, so the
    # bounds compare exactly with the fully evaluated sum.
    support_terms = phis / layout.points
    lower_terms = phis[layout.left] / layout.interior
    upper_terms = phis[layout.right] / layout.interior
    lower = math.fsum(np.concatenate((support_terms, lower_terms))) / layout.n
    upper = math.fsum(np.concatenate((support_terms, upper_terms))) / layout.n
    return lower, upper


def bounded_score(sf: SortedFeature, s: SupportSequence) -> BoundedScore:
    """Lower/upper normalized discriminability and intrinsic dimensions of one feature.

    Args:
        sf: Sorted feature
        s: Support sequence built for the same number of rows

    Returns:
        BoundedScore with the approximated intrinsic dimension
    """
    if s.n != sf.n:
        raise SelectionError(f"support sequence built for n={s.n}, feature has n={sf.n}")
    return _bounded_from_layout(sf, SupportLayout.build(s))


def approximate_dataset_discriminability(matrix: DataMatrix, s: SupportSequence,
                                         threads: Optional[int] = None) -> Tuple[float, float]:
    """Lower and upper bound on the dataset discriminability from support points."""
    if s.n != matrix.n:
        raise SelectionError(f"support sequence built for n={s.n}, matrix has n={matrix.n}")
    layout = SupportLayout.build(s)
    max_phis = max_phi_profile(matrix, layout.points, threads)
    lower = math.fsum(np.concatenate((max_phis, max_phis[layout.left])))
    upper = math.fsum(np.concatenate((max_phis, max_phis[layout.right])))
    return lower / matrix.n, upper / matrix.n


def order_by_rank_key(scores: Sequence[Score]) -> List[Score]:
    """Sort scores by ascending (approximated) intrinsic dimension, ties by index."""
    return sorted(scores, key=lambda score: (score.rank_key, score.feature_index))


def _count_inversions(leading: np.ndarray, trailing: np.ndarray) -> int:
    # Pairs k < l with leading[k] > trailing[l].
    count = 0
    for k in range(len(leading) - 1):
        count += int(np.count_nonzero(leading[k] > trailing[k + 1:]))
    return count


def _pair_ratio(count: int, d: int) -> float:
    if d < 2:
        return 0.0
    return 2.0 * count / (d * (d - 1))


def true_error_ratio(exact: Sequence[FeatureScore], approx_order: Sequence[int]) -> float:
    """Fraction of feature pairs the approximate order puts in the wrong exact order.

    Args:
        exact: Exact scores of every ranked feature (any order)
        approx_order: Feature indices by ascending approximated intrinsic dimension

    Returns:
        Error ratio in [0, 1]
    """
    if len(exact) != len(approx_order):
        raise SelectionError(
            f"{len(exact)} exact scores for {len(approx_order)} ranked features"
        )
    by_index: Dict[int, float] = {score.feature_index: score.partial_dim for score in exact}
    missing = [j for j in approx_order if j not in by_index]
    if missing:
        raise SelectionError(f"no exact score for features {missing}")
    dims = np.array([by_index[j] for j in approx_order], dtype=np.float64)
    return _pair_ratio(_count_inversions(dims, dims), len(dims))


def max_error_ratio(bounds: Sequence[BoundedScore]) -> float:
    """Computable upper bound on the true error ratio.

    Counts pairs whose earlier feature's upper intrinsic dimension strictly
    exceeds the later feature's lower one; equal endpoints do not count.
    """
    if len(bounds) < 2:
        raise SelectionError(f"need at least 2 features, got {len(bounds)}")
    ordered = order_by_rank_key(bounds)
    upper = np.array([b.id_upper for b in ordered], dtype=np.float64)
    lower = np.array([b.id_lower for b in ordered], dtype=np.float64)
    return _pair_ratio(_count_inversions(upper, lower), len(ordered))


def score_features_bounded(matrix: DataMatrix, s: SupportSequence,
                           feature_indices: Optional[Sequence[int]] = None,
                           threads: Optional[int] = None) -> List[BoundedScore]:
    """Bounded scores for the given features (all features by default)."""
    if s.n != matrix.n:
        raise SelectionError(f"support sequence built for n={s.n}, matrix has n={matrix.n}")
    layout = SupportLayout.build(s)
    indices = range(matrix.d) if feature_indices is None else feature_indices
    return map_features(
        lambda j: _bounded_from_layout(sort_feature(matrix, j), layout),
        indices, threads,
    )
