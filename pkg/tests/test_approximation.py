"""Test support sequences, bounded scores and error ratios."""

import math

import numpy as np
import pytest

from discriminability.approximation import (
    SupportLayout,
    approximate_dataset_discriminability,
    bounded_score,
    make_log_support_sequence,
    max_error_ratio,
    order_by_rank_key,
    relative_support_length,
    score_features_bounded,
    true_error_ratio,
)
from discriminability.core import dataset_discriminability, feature_discriminability, sort_feature
from discriminability.models import (
    BoundedScore,
    DataMatrix,
    FeatureScore,
    SelectionError,
    SupportSequence,
)

from conftest import columns


def bounded_with_ids(index, id_lower, id_upper):
    """A BoundedScore with the given intrinsic-dimension interval."""
    return BoundedScore.from_deltas(index, 1.0 / math.sqrt(id_upper), 1.0 / math.sqrt(id_lower))


class TestMakeLogSupportSequence:
    def test_worked_example(self):
        assert make_log_support_sequence(10, 4).points == (2, 6, 8, 10)

    def test_dense_request_covers_every_size(self):
        assert make_log_support_sequence(5, 4).points == (2, 3, 4, 5)

    def test_two_rows(self):
        assert make_log_support_sequence(2, 7).points == (2,)

    @pytest.mark.parametrize("n,l", [(3, 2), (100, 10), (1000, 50), (12345, 300), (50, 200)])
    def test_endpoints_and_order(self, n, l):
        """Test that every sequence runs strictly upward from 2 to n."""
        s = make_log_support_sequence(n, l)
        assert s.points[0] == 2
        assert s.points[-1] == n
        assert all(b > a for a, b in zip(s.points, s.points[1:]))
        assert len(s) <= l

    def test_dense_at_large_sizes(self):
        s = make_log_support_sequence(10000, 100)
        gaps = np.diff(s.points)
        assert gaps[0] > gaps[-1]

    def test_invalid_length(self):
        with pytest.raises(SelectionError):
            make_log_support_sequence(10, 1)


class TestRelativeSupportLength:
    def test_floor_of_product(self):
        assert relative_support_length(1000, 0.05) == 50
        assert relative_support_length(1000, 0.07) == 70
        assert relative_support_length(999, 0.1) == 99

    def test_clamped_to_two(self):
        assert relative_support_length(10, 0.01) == 2

    def test_numpy_scalar(self):
        """Test that numpy floats resolve like the equal Python float."""
        assert relative_support_length(1000, np.float64(0.07)) == 70
        assert relative_support_length(100, np.float32(0.5)) == 50

    def test_rejects_non_positive(self):
        with pytest.raises(SelectionError):
            relative_support_length(100, 0.0)


class TestSupportLayout:
    def test_brackets(self):
        layout = SupportLayout.build(SupportSequence((2, 5, 7), 7))
        assert list(layout.interior) == [3, 4, 6]
        assert list(layout.points[layout.left]) == [2, 2, 5]
        assert list(layout.points[layout.right]) == [5, 5, 7]


class TestBoundedScore:
    def test_worked_example(self):
        """Test the bounds for [0, 1, 3, 7] on the sequence (2, 4)."""
        sf = sort_feature(columns([0, 1, 3, 7]), 0)
        score = bounded_score(sf, SupportSequence((2, 4), 4))
        assert score.delta_upper == pytest.approx(1.145833, rel=1e-6)
        assert score.delta_lower == pytest.approx(0.645833, rel=1e-6)
        assert score.id_upper == pytest.approx(2.39751, rel=1e-5)
        assert score.id_lower == pytest.approx(0.76165, rel=1e-5)
        assert score.id_approx == pytest.approx(1.57958, rel=1e-5)

    def test_full_sequence_collapses_to_exact(self, random_matrix):
        """Test that bounds on (2, ..., n) equal the exact score bit for bit."""
        full = SupportSequence.full(random_matrix.n)
        for j in range(random_matrix.d):
            sf = sort_feature(random_matrix, j)
            exact = feature_discriminability(sf)
            bounds = bounded_score(sf, full)
            assert bounds.delta_lower == exact.delta
            assert bounds.delta_upper == exact.delta
            assert bounds.id_approx == exact.partial_dim

    @pytest.mark.parametrize("l", [2, 3, 5, 10, 25])
    def test_sandwich(self, random_matrix, l):
        """Test delta_lower <= delta <= delta_upper for every feature."""
        s = make_log_support_sequence(random_matrix.n, l)
        for j in range(random_matrix.d):
            sf = sort_feature(random_matrix, j)
            exact = feature_discriminability(sf)
            bounds = bounded_score(sf, s)
            assert bounds.delta_lower <= exact.delta <= bounds.delta_upper
            assert bounds.id_lower <= exact.partial_dim <= bounds.id_upper

    def test_refinement_tightens(self, random_matrix):
        """Test that adding support points never loosens the bounds."""
        n = random_matrix.n
        coarse = SupportSequence((2, 10, n), n)
        fine = SupportSequence((2, 5, 10, 20, 30, n), n)
        for j in range(random_matrix.d):
            sf = sort_feature(random_matrix, j)
            wide = bounded_score(sf, coarse)
            narrow = bounded_score(sf, fine)
            assert wide.delta_lower <= narrow.delta_lower
            assert narrow.delta_upper <= wide.delta_upper

    def test_constant_feature(self):
        sf = sort_feature(columns([2, 2, 2, 2, 2]), 0)
        score = bounded_score(sf, SupportSequence((2, 5), 5))
        assert math.isinf(score.id_upper)
        assert math.isinf(score.id_lower)
        assert math.isinf(score.id_approx)

    def test_sequence_for_other_n(self):
        sf = sort_feature(columns([0, 1, 3, 7]), 0)
        with pytest.raises(SelectionError):
            bounded_score(sf, SupportSequence((2, 5), 5))


class TestApproximateDatasetDiscriminability:
    def test_sandwich(self, random_matrix):
        exact = dataset_discriminability(random_matrix)
        s = make_log_support_sequence(random_matrix.n, 6)
        lower, upper = approximate_dataset_discriminability(random_matrix, s, threads=1)
        assert lower <= exact <= upper

    def test_full_sequence(self, random_matrix):
        exact = dataset_discriminability(random_matrix)
        lower, upper = approximate_dataset_discriminability(
            random_matrix, SupportSequence.full(random_matrix.n)
        )
        assert lower == exact == upper


class TestTrueErrorRatio:
    @staticmethod
    def exact(*dims):
        return [FeatureScore(j, 0.0, 0.0, dim) for j, dim in enumerate(dims)]

    def test_same_order(self):
        assert true_error_ratio(self.exact(1.0, 2.0, 3.0), [0, 1, 2]) == 0.0

    def test_single_inverted_pair(self):
        assert true_error_ratio(self.exact(1.0, 2.0), [1, 0]) == 1.0

    def test_one_of_three_pairs(self):
        assert true_error_ratio(self.exact(1.0, 2.0, 3.0), [1, 0, 2]) == pytest.approx(1 / 3)

    def test_ties_are_not_errors(self):
        assert true_error_ratio(self.exact(2.0, 2.0), [1, 0]) == 0.0

    def test_mismatched_features(self):
        with pytest.raises(SelectionError):
            true_error_ratio(self.exact(1.0, 2.0), [0, 1, 2])
        with pytest.raises(SelectionError):
            true_error_ratio(self.exact(1.0, 2.0), [0, 5])


class TestArbitrarySupportSequences:
    """Bounds must hold for any support sequence, not only log-spaced ones."""

    @staticmethod
    def random_case(seed):
        gen = np.random.default_rng(seed)
        n = int(gen.integers(3, 81))
        d = int(gen.integers(1, 6))
        if seed % 2:
            values = gen.integers(0, 10, size=(n, d)).astype(float)
        else:
            values = gen.standard_normal((n, d)) * gen.uniform(0.1, 10.0, size=d)
        interior = np.arange(3, n)
        picked = gen.choice(interior, size=int(gen.integers(0, len(interior) + 1)), replace=False)
        points = (2, *sorted(int(k) for k in picked), n)
        return DataMatrix(values), SupportSequence(points, n)

    @pytest.mark.parametrize("seed", range(100))
    def test_sandwich_and_bound(self, seed):
        matrix, s = self.random_case(seed)
        exact = [feature_discriminability(sort_feature(matrix, j)) for j in range(matrix.d)]
        bounds = order_by_rank_key(score_features_bounded(matrix, s, threads=1))
        by_index = {b.feature_index: b for b in bounds}
        for score in exact:
            b = by_index[score.feature_index]
            assert b.delta_lower <= score.delta <= b.delta_upper
            assert b.id_lower <= score.partial_dim <= b.id_upper
        if matrix.d >= 2:
            order = [b.feature_index for b in bounds]
            assert true_error_ratio(exact, order) <= max_error_ratio(bounds)


class TestMaxErrorRatio:
    def test_disjoint_intervals(self):
        bounds = [bounded_with_ids(0, 1.0, 2.0), bounded_with_ids(1, 3.0, 4.0)]
        assert max_error_ratio(bounds) == 0.0

    def test_overlapping_intervals(self):
        bounds = [bounded_with_ids(0, 1.0, 3.0), bounded_with_ids(1, 2.0, 4.0)]
        assert max_error_ratio(bounds) == 1.0

    def test_touching_intervals_do_not_count(self):
        bounds = [bounded_with_ids(0, 1.0, 2.0), bounded_with_ids(1, 2.0, 3.0)]
        assert max_error_ratio(bounds) == 0.0

    def test_needs_two_features(self):
        with pytest.raises(SelectionError):
            max_error_ratio([bounded_with_ids(0, 1.0, 2.0)])

    def test_full_sequence_has_no_potential_errors(self, random_matrix):
        bounds = score_features_bounded(random_matrix, SupportSequence.full(random_matrix.n))
        assert max_error_ratio(bounds) == 0.0

    @pytest.mark.parametrize("l", [2, 4, 8, 16])
    def test_bounds_true_error(self, random_matrix, l):
        """Test true error ratio <= maximal error ratio."""
        s = make_log_support_sequence(random_matrix.n, l)
        bounds = order_by_rank_key(score_features_bounded(random_matrix, s, threads=1))
        exact = [feature_discriminability(sort_feature(random_matrix, j))
                 for j in range(random_matrix.d)]
        order = [b.feature_index for b in bounds]
        assert true_error_ratio(exact, order) <= max_error_ratio(bounds)
