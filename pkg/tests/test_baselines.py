import numpy as np
import pytest

from corebench.baselines import (
    BaselineConfig,
    build_coreset,
    fw_coreset,
    is_coreset,
    rnd_coreset,
    sampling_sweep,
)
from corebench.giga import run as giga_run
from corebench.hilbert import build_problem, coreset_sum, relative_error

from conftest import random_problem


def axis_problem(n):
    return build_problem(np.eye(n) / n)


class TestFrankWolfe:
    def test_axis_problem_two_steps(self):
        p = axis_problem(4)
        w, diag = fw_coreset(p, 2)
        assert w.nnz == 2
        np.testing.assert_allclose(np.sort(w.values), [2.0, 2.0])
        np.testing.assert_allclose(coreset_sum(p, w), [0.5, 0.5, 0.0, 0.0])
        # relative error sqrt(N/M - 1) = 1 at N=4, M=2
        assert relative_error(p, w) == pytest.approx(1.0, abs=1e-12)
        assert diag.gammas[1] == pytest.approx(0.5)

    def test_single_vector_exact(self):
        p = build_problem([(3.0, 4.0)])
        w, _ = fw_coreset(p, 1)
        # vertex scaling sigma / sigma_0 = 1 recovers L exactly
        np.testing.assert_allclose(w.to_dense(1), [1.0])
        assert relative_error(p, w) == pytest.approx(0.0, abs=1e-15)

    def test_simplex_feasibility_throughout(self, rng):
        for _ in range(100):
            p = random_problem(rng, max_n=30, max_dim=8)
            if p.trivial or p.n == 0:
                continue
            m = int(rng.integers(1, 12))
            _, diag = fw_coreset(p, m, checkpoints=list(range(1, m + 1)))
            for snap in diag.snapshots.values():
                kept = p.to_problem(snap)
                total = float(p.norms[kept.indices] @ kept.values)
                assert total == pytest.approx(p.sigma_total, rel=1e-8)

    def test_objective_nonincreasing(self, rng):
        for _ in range(50):
            p = random_problem(rng, max_n=40, max_dim=8)
            if p.trivial or p.n == 0:
                continue
            _, diag = fw_coreset(p, 20)
            errs = np.array(diag.errors)
            assert np.all(np.diff(errs) <= 1e-10 * p.target_norm + 1e-12)

    def test_size_bounded_by_budget(self, rng):
        for _ in range(30):
            p = random_problem(rng, max_n=40, max_dim=6)
            if p.trivial or p.n == 0:
                continue
            m = int(rng.integers(1, 10))
            w, _ = fw_coreset(p, m)
            assert w.nnz <= m

    def test_degenerate_line_search_stops_early(self):
        # N=1: the iterate sits on the only vertex after initialization
        p = build_problem([(3.0, 4.0)])
        w, diag = fw_coreset(p, 5)
        assert diag.stop_reason == "degenerate line search"
        assert w.nnz == 1

    def test_snapshots_backfilled_past_early_stop(self):
        p = build_problem([(3.0, 4.0)])
        _, diag = fw_coreset(p, 5, checkpoints=[1, 3, 5])
        for m in (1, 3, 5):
            np.testing.assert_allclose(diag.snapshots[m].to_dense(1), [1.0])


class TestAxisProblemFormulas:
    """Axis-aligned dataset: closed-form errors for all constructions."""

    @pytest.mark.parametrize("n", [100, 1000])
    @pytest.mark.parametrize("m", [5, 20])
    def test_fw_error_formula(self, n, m):
        p = axis_problem(n)
        w, _ = fw_coreset(p, m)
        assert relative_error(p, w) == pytest.approx(np.sqrt(n / m - 1), abs=1e-6)

    @pytest.mark.parametrize("n", [100, 1000])
    @pytest.mark.parametrize("m", [5, 20])
    def test_is_error_formula_conditional_on_distinct(self, n, m):
        # conditional on all draws distinct, IS weights equal FW's uniform
        # solution, hence the same closed-form error
        p = axis_problem(n)
        hits = 0
        for seed in range(40):
            w = is_coreset(p, m, seed)
            if w.nnz == m:
                hits += 1
                assert relative_error(p, w) == pytest.approx(
                    np.sqrt(n / m - 1), abs=1e-6)
        assert hits > 0

    @pytest.mark.parametrize("n", [100, 1000])
    @pytest.mark.parametrize("m", [5, 20])
    def test_giga_dominates(self, n, m):
        p = axis_problem(n)
        w, _ = giga_run(p, m)
        giga_rel = relative_error(p, w)
        assert giga_rel == pytest.approx(np.sqrt(1 - m / n), abs=1e-6)
        assert giga_rel < 1.0
        wf, _ = fw_coreset(p, m)
        assert relative_error(p, wf) >= 1.0  # m < n/2 throughout


class TestImportanceSampling:
    def test_single_vector(self):
        p = build_problem([(3.0, 4.0)])
        for m in (1, 5):
            w = is_coreset(p, m, seed=0)
            np.testing.assert_allclose(w.to_dense(1), [1.0])

    def test_axis_weights_are_multiplicity_scaled(self):
        p = axis_problem(8)
        w = is_coreset(p, 6, seed=3)
        # sigma_n / sigma uniform: every weight is (N / M) x multiplicity
        mult = w.values * 6 / 8
        np.testing.assert_allclose(mult, np.round(mult))
        assert w.values.sum() * 6 / 8 == pytest.approx(6)

    def test_unbiasedness_monte_carlo(self):
        rng = np.random.default_rng(42)
        p = build_problem(rng.normal(size=(5, 3)) * [1.0, 2.0, 0.5])
        draws = 100_000
        probs = p.norms / p.sigma_total
        picks = np.random.default_rng(7).choice(5, size=draws, p=probs)
        # M=1 coresets: L(w) = (sigma / sigma_n) L_n for the drawn index
        sums = (p.sigma_total / p.norms[picks])[:, None] * p.vectors[picks]
        mean = sums.mean(axis=0)
        assert np.linalg.norm(mean - p.target) <= 0.01 * p.target_norm

    def test_seed_reproducibility(self, rng):
        p = random_problem(rng, max_n=30, max_dim=5)
        w1 = is_coreset(p, 7, seed=123)
        w2 = is_coreset(p, 7, seed=123)
        np.testing.assert_array_equal(w1.indices, w2.indices)
        np.testing.assert_array_equal(w1.values, w2.values)


class TestUniformSubsampling:
    def test_single_vector(self):
        p = build_problem([(3.0, 4.0)])
        w = rnd_coreset(p, 4, seed=0)
        np.testing.assert_allclose(w.to_dense(1), [1.0])

    def test_weight_sum_is_n(self, rng):
        for seed in range(20):
            p = random_problem(rng, max_n=25, max_dim=5)
            if p.n == 0:
                continue
            m = int(rng.integers(1, 10))
            w = rnd_coreset(p, m, seed)
            assert w.total() == pytest.approx(p.n, rel=1e-12)

    def test_unbiasedness_monte_carlo(self):
        # M = N draws with replacement (duplicates allowed): E[L(w)] = L
        rng = np.random.default_rng(24)
        p = build_problem(rng.normal(size=(5, 3)))
        reps = 100_000
        picks = np.random.default_rng(8).integers(0, 5, size=(reps, 5))
        sums = p.vectors[picks].sum(axis=1)      # weight N/M = 1 per draw
        mean = sums.mean(axis=0)
        assert np.linalg.norm(mean - p.target) <= 0.01 * p.target_norm


class TestSweepAndConfig:
    def test_sweep_prefix_consistency(self, rng):
        p = random_problem(rng, max_n=30, max_dim=5)
        if p.n == 0:
            return
        sweep = sampling_sweep(p, [2, 5, 9], seed=11, method="IS")
        single = is_coreset(p, 9, seed=11)
        np.testing.assert_array_equal(sweep[9].indices, single.indices)
        np.testing.assert_allclose(sweep[9].values, single.values)

    def test_config_dispatch(self):
        p = axis_problem(6)
        w_fw = build_coreset(p, BaselineConfig("FW", M=3))
        w_is = build_coreset(p, BaselineConfig("IS", M=3, seed=5))
        w_rn = build_coreset(p, BaselineConfig("RND", M=3, seed=5))
        assert w_fw.nnz == 3
        assert w_is.nnz <= 3 and w_rn.nnz <= 3

    def test_config_validation(self):
        with pytest.raises(ValueError, match="unknown method"):
            BaselineConfig("GREEDY", M=2)
        with pytest.raises(ValueError, match="M must be"):
            BaselineConfig("FW", M=0)
