"""Feature selection pipelines: FSD, FSDC, LSFSD and LSFSDC.

All four rank features by ascending (approximated) intrinsic dimension;
the C variants first discard features that are highly correlated with
another feature.
"""

import logging
import math
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..approximation import (
    make_log_support_sequence,
    max_error_ratio,
    order_by_rank_key,
    score_features_bounded,
    true_error_ratio,
)
from ..core import score_features
from ..models import DataMatrix, ErrorReport, Ranking, SelectionConfig, SelectionError

logger = logging.getLogger(__name__)

CHUNK_ROWS = 65536


class PrefilterResult(NamedTuple):
    """Outcome of the correlation prefilter."""
    kept: List[int]
    discarded: List[int]
    last_discard_correlation: Optional[float]


def resolve_budget(budget: Union[str, int, float], d: int) -> int:
    """Turn an absolute count, a percentage ("10%") or a fraction (0.1) into a count.

    Relative budgets map to max(1, ceil(p * d)), computed exactly.
    """
    if isinstance(budget, bool):
        raise SelectionError(f"invalid budget {budget!r}")
    text = str(budget).strip()
    try:
        if text.endswith("%"):
            fraction = Fraction(text[:-1].strip()) / 100
        else:
            fraction = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SelectionError(f"invalid budget {budget!r}; use a count, 'P%' or a fraction")

    if text.endswith("%") or fraction.denominator != 1 or fraction < 1:
        if not 0 < fraction <= 1:
            raise SelectionError(f"relative budget {budget!r} must lie in (0, 100%]")
        return max(1, math.ceil(fraction * d))
    count = int(fraction)
    if not 1 <= count <= d:
        raise SelectionError(f"budget {count} outside 1..{d}")
    return count


def pearson(matrix: DataMatrix, i: int, j: int) -> float:
    """Sample Pearson correlation of two columns; 0 when either is constant."""
    x = matrix.column(i) - matrix.column(i).mean()
    y = matrix.column(j) - matrix.column(j).mean()
    sxx = float(x @ x)
    syy = float(y @ y)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(x @ y) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def correlation_matrix(matrix: DataMatrix) -> np.ndarray:
    """d x d Pearson correlation matrix; rows/columns of constant features are 0.

    The centered cross-product is accumulated over row chunks so that no
    full centered copy of the data is held in memory.
    """
    means = matrix.values.mean(axis=0)
    cross = np.zeros((matrix.d, matrix.d), dtype=np.float64)
    for start in range(0, matrix.n, CHUNK_ROWS):
        block = matrix.values[start:start + CHUNK_ROWS] - means
        cross += block.T @ block
    scale = np.sqrt(np.diag(cross))
    constant = scale == 0.0
    scale[constant] = 1.0
    corr = cross / np.outer(scale, scale)
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    return np.clip(corr, -1.0, 1.0)


def sample_variances(matrix: DataMatrix) -> np.ndarray:
    """Per-column sample variance (ddof=1)."""
    return matrix.values.var(axis=0, ddof=1)


def correlation_prefilter(matrix: DataMatrix, n_c: int,
                          corr: Optional[np.ndarray] = None) -> PrefilterResult:
    """Iteratively discard one member of the most correlated remaining pair.

    The member with the smaller sample variance goes; on equal variance the
    larger index goes. Correlations are compared by magnitude.

    Args:
        matrix: Data matrix
        n_c: Number of features to discard
        corr: Precomputed correlation matrix (computed when omitted)

    Returns:
        Surviving indices in original order, discarded indices in discard
        order, and |correlation| of the final discarded pair
    """
    d = matrix.d
    if not 0 <= n_c < d:
        raise SelectionError(f"cannot discard {n_c} of {d} features")
    if n_c == 0:
        return PrefilterResult(list(range(d)), [], None)

    magnitude = np.abs(correlation_matrix(matrix) if corr is None else corr)
    variances = sample_variances(matrix)
    pair_mask = np.triu(np.ones((d, d), dtype=bool), k=1)
    active = np.ones(d, dtype=bool)
    discarded: List[int] = []
    last: Optional[float] = None

    for _ in range(n_c):
        candidates = pair_mask & active[:, None] & active[None, :]
        masked = np.where(candidates, magnitude, -1.0)
        a, b = np.unravel_index(int(np.argmax(masked)), masked.shape)
        a, b = int(a), int(b)
        if variances[a] < variances[b]:
            victim = a
        elif variances[b] < variances[a]:
            victim = b
        else:
            victim = max(a, b)
        active[victim] = False
        discarded.append(victim)
        last = float(magnitude[a, b])
        logger.debug("Discarded feature %d (|rho|=%.6f with pair %d/%d)", victim, last, a, b)

    kept = [int(j) for j in np.flatnonzero(active)]
    return PrefilterResult(kept, discarded, last)


def _prefilter_for(matrix: DataMatrix, config: SelectionConfig) -> PrefilterResult:
    if config.correlation_discard:
        return correlation_prefilter(matrix, config.correlation_discard)
    return PrefilterResult(list(range(matrix.d)), [], None)


def fsd(matrix: DataMatrix, config: SelectionConfig) -> Ranking:
    """Rank features by exact normalized intrinsic dimension.

    With ``config.correlation_discard`` set this is FSDC.
    """
    if config.support_length is not None:
        raise SelectionError("exact ranking does not take a support length; use lsfsd")
    config.validate(matrix.d)
    prefilter = _prefilter_for(matrix, config)

    scores = order_by_rank_key(score_features(matrix, prefilter.kept, config.threads))
    logger.info("Ranked %d features exactly (%d discarded by correlation)",
                len(scores), len(prefilter.discarded))
    return Ranking(
        ordered_features=[score.feature_index for score in scores],
        scores=list(scores),
        discarded_by_correlation=prefilter.discarded,
        last_discard_correlation=prefilter.last_discard_correlation,
    )


def lsfsd(matrix: DataMatrix, config: SelectionConfig) -> Tuple[Ranking, ErrorReport]:
    """Rank features by approximated intrinsic dimension on a log support sequence.

    With ``config.correlation_discard`` set this is LSFSDC. The true error
    ratio is only computed when ``config.verify_exact`` is set, since it
    needs the exact O(n^2) scores.
    """
    if config.support_length is None:
        raise SelectionError("approximate ranking needs a support length")
    config.validate(matrix.d)
    prefilter = _prefilter_for(matrix, config)

    support = make_log_support_sequence(matrix.n, config.support_length)
    logger.info("Support sequence: %d of %d requested points for n=%d",
                len(support), config.support_length, matrix.n)
    bounds = order_by_rank_key(
        score_features_bounded(matrix, support, prefilter.kept, config.threads)
    )
    order = [score.feature_index for score in bounds]

    max_ratio = max_error_ratio(bounds) if len(bounds) >= 2 else 0.0
    true_ratio = None
    if config.verify_exact:
        exact = score_features(matrix, prefilter.kept, config.threads)
        true_ratio = true_error_ratio(exact, order)

    ranking = Ranking(
        ordered_features=order,
        scores=list(bounds),
        discarded_by_correlation=prefilter.discarded,
        last_discard_correlation=prefilter.last_discard_correlation,
        support=support,
    )
    return ranking, ErrorReport(max_error_ratio=max_ratio, true_error_ratio=true_ratio)


def select(ranking: Ranking, budget: int) -> List[int]:
    """Budget-prefix of a ranking."""
    if not 1 <= budget <= len(ranking.ordered_features):
        raise SelectionError(
            f"budget {budget} outside 1..{len(ranking.ordered_features)}"
        )
    return ranking.top(budget)