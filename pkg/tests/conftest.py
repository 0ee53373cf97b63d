import itertools

import numpy as np
import pytest

from corebench.hilbert import build_problem


def random_problem(rng, max_n=60, max_dim=12, scale_spread=2.0):
    """Random problem with mixed signs and magnitudes across rows."""
    n = int(rng.integers(1, max_n + 1))
    d = int(rng.integers(1, max_dim + 1))
    rows = rng.normal(size=(n, d)) * np.exp(scale_spread * rng.normal(size=(n, 1)))
    return build_problem(rows)


def brute_force_error(problem, m):
    """Smallest ||L(w) - L|| over supports of size <= m with w >= 0.

    Independent oracle: exhaustive support enumeration with nonnegative
    least squares on each support. Only viable for small problems.
    """
    from scipy.optimize import nnls

    best = float(np.linalg.norm(problem.target))   # w = 0
    for size in range(1, m + 1):
        for support in itertools.combinations(range(problem.n), size):
            A = problem.vectors[list(support)].T
            _, resid = nnls(A, problem.target)
            best = min(best, resid)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
