import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as nps

from corebench.hilbert import (
    WeightVector,
    build_problem,
    coreset_sum,
    inner,
    norm,
    relative_error,
    safe_normalize,
    weighted_sum,
    zero_tol,
)

from conftest import random_problem


class TestBuildProblem:
    def test_two_orthogonal(self):
        p = build_problem([(1.0, 0.0), (0.0, 1.0)])
        np.testing.assert_allclose(p.norms, [1.0, 1.0])
        assert p.sigma_total == 2.0
        np.testing.assert_allclose(p.target, [1.0, 1.0])
        assert p.target_norm == pytest.approx(np.sqrt(2.0))

    def test_zero_norm_row_dropped_with_remap(self):
        p = build_problem([(0.0, 0.0), (2.0, 0.0)])
        assert p.n == 1
        assert p.n_original == 2
        np.testing.assert_array_equal(p.kept_indices, [1])
        np.testing.assert_allclose(p.target, [2.0, 0.0])
        # remap round trip: problem index 0 is original index 1
        w = p.to_original(WeightVector(np.array([0]), np.array([3.0])))
        np.testing.assert_array_equal(w.indices, [1])

    def test_axis_problem_constants(self):
        # four axis vectors (1/4) e_n: sigma_n = 1/N, sigma = 1, ||L|| = 1/2
        p = build_problem(np.eye(4) / 4)
        np.testing.assert_allclose(p.norms, 0.25)
        assert p.sigma_total == pytest.approx(1.0)
        assert p.target_norm == pytest.approx(0.5)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError, match="empty problem"):
            build_problem([])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="invalid vector"):
            build_problem([(1.0, np.nan)])
        with pytest.raises(ValueError, match="invalid vector"):
            build_problem([(np.inf, 0.0)])

    def test_all_zero_rows_is_trivial(self):
        p = build_problem([(0.0, 0.0), (0.0, 0.0)])
        assert p.trivial
        assert p.n == 0

    def test_cancelling_rows_is_trivial(self):
        p = build_problem([(1.0, 0.0), (-1.0, 0.0)])
        assert p.trivial
        assert p.n == 2

    def test_unit_rows_are_unit(self, rng):
        for _ in range(50):
            p = random_problem(rng)
            if p.n:
                np.testing.assert_allclose(
                    np.linalg.norm(p.unit_vectors, axis=1), 1.0, atol=1e-12)
            if not p.trivial:
                assert norm(p.unit_target) == pytest.approx(1.0, abs=1e-12)

    def test_norm_sum_dominates_target_norm(self, rng):
        # triangle inequality over 1000 fuzzed instances
        for _ in range(1000):
            p = random_problem(rng, max_n=20, max_dim=6)
            assert p.sigma_total >= p.target_norm * (1 - 1e-12)


class TestWeightedSum:
    def test_empty_weights(self):
        p = build_problem([(1.0, 0.0), (0.0, 1.0)])
        np.testing.assert_array_equal(weighted_sum(p, WeightVector.empty()), [0.0, 0.0])

    def test_two_points(self):
        p = build_problem([(1.0, 0.0), (0.0, 1.0)])
        w = WeightVector(np.array([0, 1]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(weighted_sum(p, w), [1.0, 1.0])

    def test_single_scaled(self):
        p = build_problem([(1.0, 0.0), (0.0, 1.0)])
        w = WeightVector(np.array([0]), np.array([2.0]))
        np.testing.assert_allclose(weighted_sum(p, w), [2.0, 0.0])

    def test_normalized_flag(self):
        p = build_problem([(3.0, 0.0), (0.0, 4.0)])
        w = WeightVector(np.array([0, 1]), np.array([1.0, 1.0]))
        np.testing.assert_allclose(weighted_sum(p, w, normalized=True), [1.0, 1.0])

    def test_out_of_range_index(self):
        p = build_problem([(1.0, 0.0)])
        w = WeightVector(np.array([5]), np.array([1.0]))
        with pytest.raises(IndexError):
            weighted_sum(p, w)

    @given(
        a=st.floats(0.0, 100.0),
        b=st.floats(0.0, 100.0),
        wa=nps.arrays(np.float64, 4, elements=st.floats(0.0, 1e3)),
        wb=nps.arrays(np.float64, 4, elements=st.floats(0.0, 1e3)),
    )
    @settings(max_examples=100, deadline=None)
    def test_linearity(self, a, b, wa, wb):
        p = build_problem(np.arange(8.0).reshape(4, 2) + 1.0)
        combo = WeightVector.from_dense(a * wa + b * wb)
        lhs = weighted_sum(p, combo)
        rhs = a * weighted_sum(p, WeightVector.from_dense(wa)) \
            + b * weighted_sum(p, WeightVector.from_dense(wb))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


class TestInnerNormNormalize:
    def test_orthogonal_inner(self):
        assert inner(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            inner(np.ones(2), np.ones(3))

    def test_zero_convention(self):
        np.testing.assert_array_equal(safe_normalize(np.zeros(2)), np.zeros(2))

    def test_three_four_five(self):
        np.testing.assert_allclose(safe_normalize(np.array([3.0, 4.0])), [0.6, 0.8])

    @given(nps.arrays(np.float64, 3, elements=st.floats(-1e6, 1e6)))
    @settings(max_examples=200, deadline=None)
    def test_normalize_norm_is_zero_or_one(self, u):
        n = norm(safe_normalize(u))
        assert n == 0.0 or n == pytest.approx(1.0, abs=1e-12)

    def test_tiny_vector_treated_as_zero(self):
        u = np.full(4, 1e-15)
        assert norm(u) <= zero_tol(4)
        np.testing.assert_array_equal(safe_normalize(u), np.zeros(4))


class TestWeightVector:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            WeightVector(np.array([1, 1]), np.array([1.0, 2.0]))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError, match="positive"):
            WeightVector(np.array([0]), np.array([0.0]))

    def test_from_dense_drops_zeros(self):
        w = WeightVector.from_dense(np.array([0.0, 2.0, 0.0, 1.0]))
        np.testing.assert_array_equal(w.indices, [1, 3])
        assert w.nnz == 2
        np.testing.assert_array_equal(w.to_dense(4), [0.0, 2.0, 0.0, 1.0])


class TestErrorHelpers:
    def test_relative_error_exact_cover(self):
        p = build_problem([(1.0, 0.0), (0.0, 1.0)])
        w = WeightVector(np.array([0, 1]), np.array([1.0, 1.0]))
        assert relative_error(p, w) == pytest.approx(0.0, abs=1e-15)

    def test_original_indexing_skips_dropped_rows(self):
        p = build_problem([(0.0, 0.0), (2.0, 0.0), (0.0, 3.0)])
        w = WeightVector(np.array([0, 1, 2]), np.array([5.0, 1.0, 1.0]))
        np.testing.assert_allclose(coreset_sum(p, w), [2.0, 3.0])
        assert relative_error(p, w) == pytest.approx(0.0, abs=1e-15)
