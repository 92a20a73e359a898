"""Data models for discriminability scoring, rankings and result documents."""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from dataclasses_json import dataclass_json


class DiscriminabilityError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DiscriminabilityError, ValueError):
    """The input data cannot be scored (NaN, too few rows, bad cells, ...)."""


class SelectionError(DiscriminabilityError, ValueError):
    """A parameter is out of range for the data it is applied to."""


class ConfigurationError(DiscriminabilityError, ValueError):
    """A configuration file or dictionary is invalid."""


class Method(Enum):
    """Selection pipelines and baselines."""
    FSD = "fsd"
    FSDC = "fsdc"
    LSFSD = "lsfsd"
    LSFSDC = "lsfsdc"
    RANDOM = "random"
    VARIANCE = "variance"
    CORRELATION = "correlation"
    RRFS = "rrfs"


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """n data points by d real-valued feature columns.

    Values are stored column-contiguous (Fortran order) since every
    algorithm scans whole columns.
    """
    values: np.ndarray
    names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        # Private copy; freezing it must not touch the caller's array.
        values = np.array(self.values, dtype=np.float64, order="F")
        if values.ndim != 2:
            raise DataError(f"Expected a 2-d matrix, got {values.ndim} dimension(s)")
        n, d = values.shape
        if n < 2:
            raise DataError(f"need at least 2 data points, got {n}")
        if d < 1:
            raise DataError("need at least 1 feature column")
        if not np.isfinite(values).all():
            rows, cols = np.nonzero(~np.isfinite(values))
            raise DataError(
                f"non-finite value {values[rows[0], cols[0]]!r} "
                f"at row {int(rows[0])}, column {int(cols[0])}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        names = tuple(str(name) for name in self.names) or tuple(
            str(j) for j in range(d)
        )
        if len(names) != d:
            raise DataError(f"{len(names)} column names given for {d} columns")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    def column(self, j: int) -> np.ndarray:
        """Return feature column ``j`` (read-only view)."""
        if not 0 <= j < self.d:
            raise SelectionError(f"feature index {j} out of range 0..{self.d - 1}")
        return self.values[:, j]

    def select_columns(self, indices: Sequence[int]) -> "DataMatrix":
        """Return a new matrix holding only the given columns, in that order."""
        idx = list(indices)
        return DataMatrix(self.values[:, idx], tuple(self.names[j] for j in idx))


@dataclass(frozen=True, eq=False)
class SortedFeature:
    """One feature's values in ascending order."""
    feature_index: int
    sorted_values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.sorted_values.shape[0])


@dataclass_json
@dataclass(frozen=True)
class SupportSequence:
    """Strictly increasing subset sizes (2 = s_1, ..., s_l = n) where phi is evaluated."""
    points: Tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        points = tuple(int(p) for p in self.points)
        object.__setattr__(self, "points", points)
        if not points:
            raise SelectionError("support sequence cannot be empty")
        if points[0] != 2 or points[-1] != self.n:
            raise SelectionError(
                f"support sequence must run from 2 to {self.n}, "
                f"got {points[0]}..{points[-1]}"
            )
        if any(b <= a for a, b in zip(points, points[1:])):
            raise SelectionError("support sequence must be strictly increasing")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def full(cls, n: int) -> "SupportSequence":
        """The sequence (2, 3, ..., n); bounds computed on it are exact."""
        return cls(tuple(range(2, n + 1)), n)


def _intrinsic_dimension(delta: float) -> float:
    return math.inf if delta == 0.0 else 1.0 / (delta * delta)


@dataclass_json
@dataclass(frozen=True)
class FeatureScore:
    """Exact discriminability scores of one feature."""
    feature_index: int
    delta_star: float
    delta: float
    partial_dim: float

    @classmethod
    def from_deltas(cls, feature_index: int, delta_star: float, delta: float) -> "FeatureScore":
        return cls(feature_index, delta_star, delta, _intrinsic_dimension(delta))

    @property
    def rank_key(self) -> float:
        return self.partial_dim


@dataclass_json
@dataclass(frozen=True)
class BoundedScore:
    """Lower/upper normalized discriminability of one feature for a support sequence."""
    feature_index: int
    delta_lower: float
    delta_upper: float
    id_lower: float
    id_upper: float
    id_approx: float

    def __post_init__(self) -> None:
        if self.delta_lower > self.delta_upper:
            raise ValueError(
                f"delta_lower {self.delta_lower} exceeds delta_upper {self.delta_upper}"
            )

    @classmethod
    def from_deltas(cls, feature_index: int, delta_lower: float, delta_upper: float) -> "BoundedScore":
        # The upper ID comes from the lower discriminability and vice versa.
        id_lower = _intrinsic_dimension(delta_upper)
        id_upper = _intrinsic_dimension(delta_lower)
        if math.isinf(id_upper):
            id_approx = math.inf
        else:
            id_approx = (id_lower + id_upper) / 2.0
        return cls(feature_index, delta_lower, delta_upper, id_lower, id_upper, id_approx)

    @property
    def rank_key(self) -> float:
        return self.id_approx


Score = Union[FeatureScore, BoundedScore]


@dataclass_json
@dataclass
class ErrorReport:
    """Ranking error diagnostics of an approximate run."""
    max_error_ratio: float
    true_error_ratio: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.max_error_ratio <= 1.0:
            raise ValueError(f"max_error_ratio {self.max_error_ratio} outside [0, 1]")
        if self.true_error_ratio is not None and not 0.0 <= self.true_error_ratio <= 1.0:
            raise ValueError(f"true_error_ratio {self.true_error_ratio} outside [0, 1]")

    @property
    def bound_holds(self) -> Optional[bool]:
        if self.true_error_ratio is None:
            return None
        return self.true_error_ratio <= self.max_error_ratio


@dataclass
class SelectionConfig:
    """Parameters of one selection run."""
    budget: int
    correlation_discard: Optional[int] = None
    support_length: Optional[int] = None
    seed: Optional[int] = None
    verify_exact: bool = False
    threads: Optional[int] = None

    def validate(self, d: int) -> None:
        """Check the configuration against a feature count ``d``."""
        discard = self.correlation_discard or 0
        if self.correlation_discard is not None and not 0 <= self.correlation_discard < d:
            raise SelectionError(
                f"cannot discard {self.correlation_discard} of {d} features"
            )
        if not 1 <= self.budget <= d - discard:
            raise SelectionError(
                f"budget {self.budget} outside 1..{d - discard} "
                f"({d} features, {discard} discarded by correlation)"
            )
        if self.support_length is not None and self.support_length < 2:
            raise SelectionError(f"support length must be >= 2, got {self.support_length}")

    @property
    def method(self) -> Method:
        if self.support_length is None:
            return Method.FSDC if self.correlation_discard else Method.FSD
        return Method.LSFSDC if self.correlation_discard else Method.LSFSD


@dataclass
class Ranking:
    """Features ordered by ascending (approximated) intrinsic dimension."""
    ordered_features: List[int]
    scores: List[Score]
    discarded_by_correlation: List[int] = field(default_factory=list)
    last_discard_correlation: Optional[float] = None
    support: Optional[SupportSequence] = None

    def __post_init__(self) -> None:
        if len(self.ordered_features) != len(self.scores):
            raise ValueError("ordered_features and scores must have equal length")
        seen = set(self.ordered_features) | set(self.discarded_by_correlation)
        if len(seen) != len(self.ordered_features) + len(self.discarded_by_correlation):
            raise ValueError("ranking contains duplicate feature indices")

    @property
    def is_approximate(self) -> bool:
        return self.support is not None

    def top(self, budget: int) -> List[int]:
        """Return the first ``budget`` features of the ranking."""
        return self.ordered_features[:budget]


@dataclass_json
@dataclass
class BaselineResult:
    """Selection made by one of the reference selectors."""
    method: Method
    selected: List[int]
    aux: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("baseline selection contains duplicate indices")


@dataclass_json
@dataclass
class IngestSpec:
    """How to read a delimited text file into a DataMatrix."""
    path: str
    has_header: bool = True
    delimiter: str = ","
    column_filter: Optional[List[str]] = None
    na_policy: str = "reject"

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be a single character, got {self.delimiter!r}")
        if self.na_policy != "reject":
            raise ValueError("only the 'reject' NA policy is supported")


@dataclass_json
@dataclass
class RankedFeature:
    """One row of a serialized ranking."""
    rank: int
    index: int
    name: str
    delta_star: Optional[float] = None
    delta: Optional[float] = None
    partial_dim: Optional[float] = None
    delta_lower: Optional[float] = None
    delta_upper: Optional[float] = None
    id_lower: Optional[float] = None
    id_upper: Optional[float] = None
    id_approx: Optional[float] = None

    @classmethod
    def from_score(cls, rank: int, name: str, score: Score) -> "RankedFeature":
        if isinstance(score, FeatureScore):
            return cls(rank, score.feature_index, name,
                       delta_star=score.delta_star,
                       delta=score.delta,
                       partial_dim=score.partial_dim)
        return cls(rank, score.feature_index, name,
                   delta_lower=score.delta_lower,
                   delta_upper=score.delta_upper,
                   id_lower=score.id_lower,
                   id_upper=score.id_upper,
                   id_approx=score.id_approx)

    def score_fields(self) -> Dict[str, float]:
        """Score columns that are set on this row."""
        names = ("delta_star", "delta", "partial_dim", "delta_lower",
                 "delta_upper", "id_lower", "id_upper", "id_approx")
        return {name: getattr(self, name) for name in names
                if getattr(self, name) is not None}


@dataclass_json
@dataclass
class SweepPoint:
    """Maximal error ratio at one relative support length."""
    relative_length: float
    requested_length: int
    effective_length: int
    max_error_ratio: float


@dataclass_json
@dataclass
class ResultDocument:
    """Self-describing output of one CLI run."""
    method: str
    params: Dict[str, Any]
    dataset: Dict[str, Any] = field(default_factory=dict)
    ranking: List[RankedFeature] = field(default_factory=list)
    selected: List[int] = field(default_factory=list)
    selected_names: List[str] = field(default_factory=list)
    discarded: List[int] = field(default_factory=list)
    error_report: Optional[ErrorReport] = None
    sweep: Optional[List[SweepPoint]] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.ranking is None:
            self.ranking = []
        if self.metadata is None:
            self.metadata = {}
        if self.timing is None:
            self.timing = {}

    def accounted_features(self) -> int:
        """Number of features covered by the ranking plus the discarded list."""
        return len(self.ranking) + len(self.discarded)

    def without_timing(self) -> Dict[str, Any]:
        """Dictionary form with wall-clock timings removed."""
        payload = self.to_dict()
        payload.pop("timing", None)
        return payload

    def to_json(self, indent: int = 2) -> str:  # type: ignore[override]
        """Convert the document to a JSON string."""
        return json.dumps(self.to_dict(), indent=indent)

    def to_yaml(self) -> str:
        """Convert the document to a YAML string."""
        return yaml.safe_dump(self.to_dict(), default_flow_style=False,
                              indent=2, sort_keys=False)

    def to_json_file(self, file_path: str, indent: int = 2) -> None:
        """Save the document to a JSON file."""
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(self.to_json(indent=indent))
