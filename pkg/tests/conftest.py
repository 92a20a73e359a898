"""Shared fixtures."""

from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pytest

from discriminability.models import DataMatrix


def columns(*cols: Sequence[float]) -> DataMatrix:
    """Build a DataMatrix from feature columns."""
    return DataMatrix(np.column_stack([np.asarray(c, dtype=float) for c in cols]))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def random_matrix(rng: np.random.Generator) -> DataMatrix:
    """40 rows, 6 features of different shapes and scales."""
    n = 40
    values = np.column_stack([
        rng.uniform(0, 1, n),
        rng.normal(0, 0.05, n),
        rng.exponential(2.0, n),
        rng.uniform(-5, 5, n),
        np.round(rng.normal(0, 1, n), 1),
        rng.standard_t(3, n),
    ])
    return DataMatrix(values, tuple(f"f{j}" for j in range(values.shape[1])))


@pytest.fixture
def write_csv(tmp_path: Path) -> Callable[[str, str], str]:
    """Write ``content`` to ``tmp_path / name`` and return the path."""
    def _write(content: str, name: str = "data.csv") -> str:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)
    return _write
