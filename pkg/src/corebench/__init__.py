"""Sparse nonnegative coreset construction for vector sums.

Greedy iterative geodesic ascent with optimal output scaling, plus
Frank-Wolfe / importance-sampling / uniform-subsampling baselines, Bayesian
model embeddings, a spherical cap-tree for accelerated selection, and a
benchmark CLI.
"""

from .baselines import (
    BaselineConfig,
    FwDiagnostics,
    build_coreset,
    fw_coreset,
    is_coreset,
    rnd_coreset,
    sampling_sweep,
)
from .captree import CapNode, build as build_cap_tree, node_lower_bound, node_upper_bound
from .captree import search as captree_search
from .giga import GigaDiagnostics, GigaState, IterationTrace
from .giga import finalize as giga_finalize
from .giga import run as giga_run
from .hilbert import (
    CoresetProblem,
    WeightVector,
    build_problem,
    coreset_sum,
    inner,
    norm,
    relative_error,
    safe_normalize,
    weighted_sum,
)
from .models import (
    GaussianMeanData,
    LaplaceApprox,
    ProjectionConfig,
    RegressionData,
    coreset_posterior_variance,
    gaussian_embed,
    laplace,
    log_likelihood_grad,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "CapNode",
    "CoresetProblem",
    "FwDiagnostics",
    "GaussianMeanData",
    "GigaDiagnostics",
    "GigaState",
    "IterationTrace",
    "LaplaceApprox",
    "ProjectionConfig",
    "RegressionData",
    "WeightVector",
    "build_cap_tree",
    "build_coreset",
    "build_problem",
    "captree_search",
    "coreset_posterior_variance",
    "coreset_sum",
    "fw_coreset",
    "gaussian_embed",
    "giga_finalize",
    "giga_run",
    "inner",
    "is_coreset",
    "laplace",
    "log_likelihood_grad",
    "node_lower_bound",
    "node_upper_bound",
    "norm",
    "project",
    "relative_error",
    "rnd_coreset",
    "safe_normalize",
    "sampling_sweep",
    "weighted_sum",
]
