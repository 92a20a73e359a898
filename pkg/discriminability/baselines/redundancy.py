"""Correlation-only and RRFS (relevance-redundancy) selection."""

import logging
import math
from typing import Any, List, Optional

import numpy as np

from ..models import BaselineResult, DataMatrix, Method, SelectionError
from ..selection import correlation_matrix, correlation_prefilter
from . import Baseline, check_budget
from .simple import variance_order

logger = logging.getLogger(__name__)

DEFAULT_DISCARD_FRACTION = 0.1


def select_by_correlation(matrix: DataMatrix, budget: int) -> BaselineResult:
    """Discard correlated features until only ``budget`` remain."""
    check_budget(budget, matrix.d)
    prefilter = correlation_prefilter(matrix, matrix.d - budget)
    return BaselineResult(
        Method.CORRELATION,
        prefilter.kept,
        {"discarded": prefilter.discarded,
         "last_discard_correlation": prefilter.last_discard_correlation},
    )


def select_rrfs(matrix: DataMatrix, budget: int, threshold: float) -> BaselineResult:
    """Greedy variance-ordered selection with a similarity threshold.

    A candidate is kept iff |rho| with the last kept feature is below
    ``threshold``. If the candidates run out first, the highest-variance
    skipped features fill the remaining slots.
    """
    check_budget(budget, matrix.d)
    if not 0.0 <= threshold <= 1.0:
        raise SelectionError(f"threshold must lie in [0, 1], got {threshold}")

    magnitude = np.abs(correlation_matrix(matrix))
    order = variance_order(matrix)
    selected: List[int] = [order[0]]
    skipped: List[int] = []
    for candidate in order[1:]:
        if len(selected) == budget:
            break
        if magnitude[candidate, selected[-1]] < threshold:
            selected.append(candidate)
        else:
            skipped.append(candidate)

    backfilled = budget - len(selected)
    if backfilled:
        logger.info("RRFS kept %d features at threshold %.4f; backfilling %d",
                    len(selected), threshold, backfilled)
        selected.extend(skipped[:backfilled])

    return BaselineResult(
        Method.RRFS,
        selected,
        {"threshold": threshold, "backfilled": backfilled > 0,
         "backfill_count": backfilled},
    )


def default_discard_count(d: int) -> int:
    """Ten percent of the features, at least one, always leaving one."""
    return min(d - 1, max(1, math.ceil(DEFAULT_DISCARD_FRACTION * d)))


def rrfs_threshold_from_prefilter(matrix: DataMatrix, n_c: Optional[int] = None) -> float:
    """|rho| of the last pair used to discard a feature in the correlation prefilter."""
    if matrix.d < 2:
        return 1.0
    count = default_discard_count(matrix.d) if n_c is None else n_c
    last = correlation_prefilter(matrix, count).last_discard_correlation
    return 1.0 if last is None else last


class CorrelationBaseline(Baseline):
    method = Method.CORRELATION

    def select(self, matrix: DataMatrix, budget: int, **params: Any) -> BaselineResult:
        return select_by_correlation(matrix, budget)


class RRFSBaseline(Baseline):
    method = Method.RRFS

    def select(self, matrix: DataMatrix, budget: int, **params: Any) -> BaselineResult:
        threshold = params.get("threshold")
        if threshold is None:
            threshold = rrfs_threshold_from_prefilter(matrix, params.get("discard_correlated"))
            logger.info("RRFS threshold %.6f taken from the correlation prefilter", threshold)
        return select_rrfs(matrix, budget, threshold)
