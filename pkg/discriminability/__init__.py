"""
Feature Selection via Discriminability

Ranks the features of a tabular dataset by how well each one separates
data subsets of every size. Features that concentrate (high normalized
intrinsic dimension) are the ones hit by the curse of dimensionality and
rank last.

Features:
- Exact partial diameters and discriminability scores (FSD, FSDC)
- Support-sequence approximation for million-row data (LSFSD, LSFSDC)
- Computable bound on the ranking errors of the approximation
- Random, variance, correlation and RRFS baselines
- Deterministic output for any thread count

Example usage:
    from discriminability import FeatureSelector

    selector = FeatureSelector()
    matrix = selector.load("data.csv")
    document = selector.rank(matrix, budget="10%")
    print(document.selected_names)

Command-line usage:
    discriminability select data.csv --budget 10% --out result.json
"""

__version__ = "1.0.0"
__license__ = "MIT"

import logging
import time
from typing import Any, Dict, List, Optional, Sequence, Union

from .approximation import (
    make_log_support_sequence,
    max_error_ratio,
    relative_support_length,
    score_features_bounded,
)
from .baselines import BaselineEngine
from .bench import average_sweeps, generate_synthetic, planted_recall, run_bench, sweep_max_error
from .config import SelectorConfig, create_default_config_file
from .core import (
    dataset_discriminability,
    dataset_intrinsic_dimension,
    observable_diameter,
)
from .io import ingest_csv
from .models import (
    BaselineResult,
    BoundedScore,
    ConfigurationError,
    DataError,
    DataMatrix,
    DiscriminabilityError,
    ErrorReport,
    FeatureScore,
    IngestSpec,
    Method,
    RankedFeature,
    Ranking,
    ResultDocument,
    SelectionConfig,
    SelectionError,
    SupportSequence,
)
from .selection import correlation_prefilter, fsd, lsfsd, resolve_budget

logger = logging.getLogger(__name__)

Budget = Union[str, int, float]


def _dataset_info(matrix: DataMatrix, source: Optional[str]) -> Dict[str, Any]:
    info: Dict[str, Any] = {"n": matrix.n, "d": matrix.d}
    if source is not None:
        info["source"] = source
    return info


class FeatureSelector:
    """Main entry point: loads data and runs selection pipelines into ResultDocuments."""

    def __init__(self, config: Optional[SelectorConfig] = None):
        """Initialize the selector.

        Args:
            config: Selector configuration (defaults when omitted)
        """
        self.config = config or SelectorConfig.create_default()
        self.baseline_engine = BaselineEngine()
        self.baseline_engine.register_builtin_baselines()

    def load(self, path: str,
             delimiter: Optional[str] = None,
             has_header: Optional[bool] = None,
             columns: Optional[List[str]] = None) -> DataMatrix:
        """Read a CSV/TSV file, falling back to configured parsing options."""
        spec = IngestSpec(
            path=path,
            has_header=self.config.has_header() if has_header is None else has_header,
            delimiter=delimiter or self.config.get_delimiter(),
            column_filter=columns,
        )
        return ingest_csv(spec)

    def _threads(self, threads: Optional[int]) -> Optional[int]:
        return threads if threads is not None else self.config.get_threads()

    def _budget(self, budget: Optional[Budget], d: int) -> int:
        raw = budget if budget is not None else self.config.get_budget()
        if raw is None:
            raise SelectionError("a budget is required")
        return resolve_budget(raw, d)

    def _support_length(self, n: int,
                        support_length: Optional[int],
                        relative_length: Optional[float]) -> int:
        if support_length is not None and relative_length is not None:
            raise SelectionError("give either a support length or a relative length, not both")
        if support_length is None and relative_length is None:
            support_length = self.config.get_support_length()
            relative_length = self.config.get_relative_length()
        if support_length is not None:
            return support_length
        if relative_length is not None:
            return relative_support_length(n, relative_length)
        raise SelectionError("approximate ranking needs a support length or a relative length")

    def _ranking_document(self, matrix: DataMatrix, ranking: Ranking,
                          config: SelectionConfig,
                          budget: Optional[int], params: Dict[str, Any],
                          source: Optional[str],
                          error_report: Optional[ErrorReport] = None,
                          timing: Optional[Dict[str, float]] = None) -> ResultDocument:
        rows = [RankedFeature.from_score(rank, matrix.names[score.feature_index], score)
                for rank, score in enumerate(ranking.scores, start=1)]
        selected = ranking.ordered_features if budget is None else ranking.top(budget)
        metadata: Dict[str, Any] = {
            "approximate": ranking.is_approximate,
            "last_discard_correlation": ranking.last_discard_correlation,
        }
        if ranking.support is not None:
            metadata["support_sequence_length"] = len(ranking.support)
        return ResultDocument(
            method=config.method.value,
            params=params,
            dataset=_dataset_info(matrix, source),
            ranking=rows,
            selected=list(selected),
            selected_names=[matrix.names[j] for j in selected],
            discarded=list(ranking.discarded_by_correlation),
            error_report=error_report,
            metadata=metadata,
            timing=timing or {},
        )

    def rank(self, matrix: DataMatrix,
             budget: Optional[Budget] = None,
             discard_correlated: Optional[int] = None,
             threads: Optional[int] = None,
             source: Optional[str] = None,
             full: bool = False) -> ResultDocument:
        """Exact ranking (FSD, or FSDC with ``discard_correlated``).

        Args:
            matrix: Data matrix
            budget: Count, percentage or fraction of features to select
            discard_correlated: Features to discard by correlation first
            threads: Scoring threads
            source: Input path echoed into the document
            full: Select the whole ranking instead of the budget prefix

        Returns:
            ResultDocument with the full ranking and the selection
        """
        discard = discard_correlated if discard_correlated is not None \
            else self.config.get_discard_correlated()
        resolved = (matrix.d - (discard or 0)) if full else self._budget(budget, matrix.d)
        config = SelectionConfig(budget=resolved, correlation_discard=discard,
                                 threads=self._threads(threads))

        started = time.perf_counter()
        ranking = fsd(matrix, config)
        elapsed = time.perf_counter() - started

        params = {"budget": None if full else resolved, "discard_correlated": discard}
        return self._ranking_document(matrix, ranking, config, None if full else resolved,
                                      params, source, timing={"scoring": elapsed})

    def approx_rank(self, matrix: DataMatrix,
                    support_length: Optional[int] = None,
                    relative_length: Optional[float] = None,
                    verify_exact: bool = False,
                    budget: Optional[Budget] = None,
                    discard_correlated: Optional[int] = None,
                    threads: Optional[int] = None,
                    source: Optional[str] = None) -> ResultDocument:
        """Approximate ranking (LSFSD, or LSFSDC) with its error report."""
        discard = discard_correlated if discard_correlated is not None \
            else self.config.get_discard_correlated()
        length = self._support_length(matrix.n, support_length, relative_length)
        resolved = self._budget(budget, matrix.d)
        config = SelectionConfig(budget=resolved, correlation_discard=discard,
                                 support_length=length, verify_exact=verify_exact,
                                 threads=self._threads(threads))

        started = time.perf_counter()
        ranking, report = lsfsd(matrix, config)
        elapsed = time.perf_counter() - started

        params = {
            "budget": resolved,
            "discard_correlated": discard,
            "support_length": length,
            "relative_length": relative_length,
            "verify_exact": verify_exact,
        }
        return self._ranking_document(matrix, ranking, config, resolved, params, source,
                                      error_report=report, timing={"scoring": elapsed})

    def error_bound(self, matrix: DataMatrix,
                    support_length: Optional[int] = None,
                    relative_length: Optional[float] = None,
                    sweep: Optional[Sequence[float]] = None,
                    threads: Optional[int] = None,
                    source: Optional[str] = None) -> ResultDocument:
        """Maximal error ratio for one support length or a sweep of relative lengths."""
        if matrix.d < 2:
            raise SelectionError("error ratios need at least 2 features")
        threads = self._threads(threads)
        started = time.perf_counter()
        if sweep is not None:
            if support_length is not None or relative_length is not None:
                raise SelectionError("a sweep cannot be combined with a single support length")
            points = sweep_max_error(matrix, sweep, threads)
            params: Dict[str, Any] = {"sweep": [p.relative_length for p in points]}
            report = None
        else:
            length = self._support_length(matrix.n, support_length, relative_length)
            support = make_log_support_sequence(matrix.n, length)
            ratio = max_error_ratio(score_features_bounded(matrix, support, None, threads))
            params = {
                "support_length": length,
                "relative_length": relative_length,
                "effective_length": len(support),
            }
            report = ErrorReport(max_error_ratio=ratio)
            points = None
        elapsed = time.perf_counter() - started

        return ResultDocument(
            method="error-bound",
            params=params,
            dataset=_dataset_info(matrix, source),
            error_report=report,
            sweep=points,
            timing={"scoring": elapsed},
        )

    def baseline(self, matrix: DataMatrix, method: str,
                 budget: Optional[Budget] = None,
                 seed: Optional[int] = None,
                 threshold: Optional[float] = None,
                 discard_correlated: Optional[int] = None,
                 source: Optional[str] = None) -> ResultDocument:
        """Run one of the reference selectors."""
        resolved = self._budget(budget, matrix.d)
        params: Dict[str, Any] = {"budget": resolved}
        kwargs: Dict[str, Any] = {}
        if method == Method.RANDOM.value:
            kwargs["seed"] = params["seed"] = seed if seed is not None else self.config.get_seed()
        if method == Method.RRFS.value:
            kwargs["threshold"] = params["threshold"] = threshold
            kwargs["discard_correlated"] = params["discard_correlated"] = discard_correlated

        started = time.perf_counter()
        result: BaselineResult = self.baseline_engine.run(method, matrix, resolved, **kwargs)
        elapsed = time.perf_counter() - started

        return ResultDocument(
            method=result.method.value,
            params=params,
            dataset=_dataset_info(matrix, source),
            selected=list(result.selected),
            selected_names=[matrix.names[j] for j in result.selected],
            metadata=dict(result.aux),
            timing={"selection": elapsed},
        )

    def describe(self, matrix: DataMatrix, alpha: Optional[float] = None,
                 threads: Optional[int] = None,
                 source: Optional[str] = None) -> ResultDocument:
        """Dataset-level discriminability and intrinsic dimension."""
        threads = self._threads(threads)
        started = time.perf_counter()
        metadata: Dict[str, Any] = {
            "discriminability": dataset_discriminability(matrix, threads),
            "intrinsic_dimension": dataset_intrinsic_dimension(matrix, threads),
        }
        if alpha is not None:
            metadata["observable_diameter"] = observable_diameter(matrix, alpha, threads)
        elapsed = time.perf_counter() - started
        return ResultDocument(
            method="describe",
            params={"alpha": alpha},
            dataset=_dataset_info(matrix, source),
            metadata=metadata,
            timing={"scoring": elapsed},
        )

    def bench(self, rows: Optional[int] = None,
              features: Optional[int] = None,
              planted: Optional[int] = None,
              seeds: Optional[int] = None,
              seed: Optional[int] = None,
              relative_length: Optional[float] = None,
              sweep: Optional[Sequence[float]] = None,
              exact: bool = True,
              threads: Optional[int] = None) -> ResultDocument:
        """Compare all methods on synthetic planted data (and optionally sweep support lengths)."""
        bench_config = self.config.get_bench_config()
        rows = rows or bench_config["rows"]
        features = features or bench_config["features"]
        planted = bench_config["planted"] if planted is None else planted
        seed_count = seeds or bench_config["seeds"]
        first_seed = seed if seed is not None else (self.config.get_seed() or 0)
        seed_list = list(range(first_seed, first_seed + seed_count))
        relative_length = relative_length or bench_config["relative_length"]
        threads = self._threads(threads)

        result = run_bench(rows, features, planted, seed_list, relative_length,
                           threads=threads, exact=exact)
        metadata: Dict[str, Any] = {
            "rows": [row.to_dict() for row in result.rows],
            "mean_recall": result.summary(),
        }
        sweep_points = None
        if sweep:
            sweeps = [sweep_max_error(generate_synthetic(rows, features, planted, s).matrix,
                                      sweep, threads)
                      for s in seed_list]
            metadata["mean_sweep"] = [{"relative_length": r, "max_error_ratio": v}
                                      for r, v in average_sweeps(sweeps)]
            sweep_points = sweeps[0]

        return ResultDocument(
            method="bench",
            params={
                "rows": rows, "features": features, "planted": planted,
                "seeds": seed_list, "relative_length": relative_length, "exact": exact,
            },
            sweep=sweep_points,
            metadata=metadata,
            timing=result.timing,
        )


def create_selector_from_config_file(config_file: str) -> FeatureSelector:
    """Create a selector from a YAML configuration file."""
    return FeatureSelector(SelectorConfig.from_file(config_file))


def create_default_selector() -> FeatureSelector:
    """Create a selector with default configuration."""
    return FeatureSelector()


__all__ = [
    # Core classes
    "FeatureSelector",
    "SelectorConfig",

    # Data models
    "DataMatrix",
    "SupportSequence",
    "FeatureScore",
    "BoundedScore",
    "ErrorReport",
    "Ranking",
    "SelectionConfig",
    "BaselineResult",
    "IngestSpec",
    "ResultDocument",
    "Method",

    # Errors
    "DiscriminabilityError",
    "DataError",
    "SelectionError",
    "ConfigurationError",

    # Pipelines
    "fsd",
    "lsfsd",
    "correlation_prefilter",
    "generate_synthetic",
    "planted_recall",

    # Factory functions
    "create_selector_from_config_file",
    "create_default_selector",
    "create_default_config_file",

    "__version__",
]
