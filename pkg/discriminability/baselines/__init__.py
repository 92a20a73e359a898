"""Reference selectors the discriminability ranking is compared against."""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Type

from ..models import BaselineResult, DataMatrix, Method, SelectionError

logger = logging.getLogger(__name__)


def check_budget(budget: int, d: int) -> None:
    """Raise unless 1 <= budget <= d."""
    if not 1 <= budget <= d:
        raise SelectionError(f"budget {budget} outside 1..{d}")


class Baseline(ABC):
    """Abstract base class for baseline selectors."""

    method: Method

    @abstractmethod
    def select(self, matrix: DataMatrix, budget: int, **params: Any) -> BaselineResult:
        """Select ``budget`` features of ``matrix``.

        Args:
            matrix: Data matrix
            budget: Number of features to select
            **params: Method-specific parameters (seed, threshold, ...)

        Returns:
            BaselineResult with exactly ``budget`` indices
        """

    @property
    def name(self) -> str:
        return self.method.value


class BaselineRegistry:
    """Registry for baseline selectors."""

    def __init__(self) -> None:
        self._instances: Dict[str, Baseline] = {}

    def register_baseline(self, baseline_class: Type[Baseline]) -> None:
        """Register a baseline class under its method name."""
        instance = baseline_class()
        self._instances[instance.name] = instance

    def get_baseline(self, name: str) -> Optional[Baseline]:
        return self._instances.get(name)

    def list_names(self) -> List[str]:
        return list(self._instances.keys())


class BaselineEngine:
    """Runs registered baselines by name."""

    def __init__(self, registry: Optional[BaselineRegistry] = None) -> None:
        self.registry = registry or BaselineRegistry()

    def register_builtin_baselines(self) -> None:
        """Register the random, variance, correlation and RRFS selectors."""
        from .redundancy import CorrelationBaseline, RRFSBaseline
        from .simple import RandomBaseline, VarianceBaseline

        for baseline_class in (RandomBaseline, VarianceBaseline,
                               CorrelationBaseline, RRFSBaseline):
            self.registry.register_baseline(baseline_class)

    def run(self, name: str, matrix: DataMatrix, budget: int, **params: Any) -> BaselineResult:
        """Run baseline ``name``; unknown names raise SelectionError."""
        baseline = self.registry.get_baseline(name)
        if baseline is None:
            known = ", ".join(sorted(self.registry.list_names()))
            raise SelectionError(f"unknown baseline {name!r} (known: {known})")
        result = baseline.select(matrix, budget, **params)
        logger.info("Baseline %s selected %d of %d features", name, len(result.selected), matrix.d)
        return result
