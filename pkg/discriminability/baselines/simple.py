"""Random and variance-based selection."""

from typing import Any, List, Optional

import numpy as np

from ..models import BaselineResult, DataMatrix, Method
from ..selection import sample_variances
from . import Baseline, check_budget


def variance_order(matrix: DataMatrix) -> List[int]:
    """Feature indices by descending sample variance, ties by ascending index."""
    variances = sample_variances(matrix)
    return [int(j) for j in np.lexsort((np.arange(matrix.d), -variances))]


def select_random(d: int, budget: int, seed: Optional[int]) -> BaselineResult:
    """Uniform sample of ``budget`` features without replacement, reproducible from ``seed``."""
    check_budget(budget, d)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(d, size=budget, replace=False)
    return BaselineResult(Method.RANDOM, sorted(int(j) for j in chosen), {"seed": seed})


def select_by_variance(matrix: DataMatrix, budget: int) -> BaselineResult:
    """The ``budget`` features with the highest sample variance."""
    check_budget(budget, matrix.d)
    return BaselineResult(Method.VARIANCE, variance_order(matrix)[:budget])


class RandomBaseline(Baseline):
    method = Method.RANDOM

    def select(self, matrix: DataMatrix, budget: int, **params: Any) -> BaselineResult:
        return select_random(matrix.d, budget, params.get("seed"))


class VarianceBaseline(Baseline):
    method = Method.VARIANCE

    def select(self, matrix: DataMatrix, budget: int, **params: Any) -> BaselineResult:
        return select_by_variance(matrix, budget)
