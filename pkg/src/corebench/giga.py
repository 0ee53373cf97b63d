"""Greedy iterative geodesic ascent for sparse vector-sum approximation.

Works on the normalized problem: maximize <ell(w), ell> over unit-norm
nonnegative combinations ell(w) = sum_n w_n ell_n. Each iteration picks the
point whose geodesic from the current iterate is most aligned with the
geodesic toward ell, takes a closed-form line-search step, and renormalizes.
The output weights are rescaled so that alpha* L(w) optimally approximates
L = sum_n L_n:

    alpha* = (||L|| / ||L(w)||) * max{0, <ell(w), ell>}.

The iterate ell(w_t) is cached and updated in O(1) vector operations per
step (storage option with cached sums); w_t is kept as a dense array over
the problem's kept indexing and sparsified only on output.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .captree import CapNode, cap_objective
from .captree import build as build_cap_tree
from .captree import search as captree_search
from .hilbert import CoresetProblem, WeightVector, zero_tol

RENORM_INTERVAL = 64       # cached-iterate renormalization cadence
STEP_DENOM_TOL = 1e-12     # line-search denominator guard
CLAMP_WARN_TOL = 1e-9      # gamma outside [0,1] beyond this is suspicious


class Converged(Exception):
    """Residual direction exhausted; the iterate cannot improve further."""


class DegenerateStep(Exception):
    """Line-search denominator vanished (selected point coincides with iterate)."""


@dataclass(eq=False)
class GigaState:
    """Iterate after t steps: weights (normalized coordinates), cached unit
    iterate ell(w_t), its alignment <ell(w_t), ell>, and J_t = 1 - alignment^2."""

    t: int
    weights: np.ndarray
    ell_w: np.ndarray
    alignment: float
    J: float


@dataclass
class IterationTrace:
    """Per-step intermediates: selected index, geodesic alignment score,
    the three line-search inner products, and the step size."""

    n_t: int
    score: float
    zeta0: float   # <ell, ell_{n_t}>
    zeta1: float   # <ell, ell(w_t)>
    zeta2: float   # <ell_{n_t}, ell(w_t)>
    gamma: float = float("nan")


@dataclass
class GigaDiagnostics:
    traces: list[IterationTrace] = field(default_factory=list)
    alignments: list[float] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)       # J_t per step
    sizes: list[int] = field(default_factory=list)         # ||w_t||_0 per step
    times: list[float] = field(default_factory=list)       # cumulative cpu seconds
    stop_reason: str | None = None
    snapshots: dict[int, WeightVector] = field(default_factory=dict)

    @property
    def eta(self) -> float:
        """sqrt(J_1): the scale factor of the first-step cost."""
        return float(np.sqrt(self.costs[0])) if self.costs else float("nan")


def initial_state(problem: CoresetProblem) -> GigaState:
    return GigaState(
        t=0,
        weights=np.zeros(problem.n),
        ell_w=np.zeros(problem.dimension),
        alignment=0.0,
        J=1.0,
    )


def select(problem: CoresetProblem, state: GigaState,
           searcher: CapNode | None = None) -> IterationTrace:
    """Pick the point whose geodesic direction best matches the residual.

    Computes d_t = (ell - <ell, ell(w)> ell(w)) / ||.|| and maximizes
    <d_t, d_tn> over n, where d_tn is the analogous tangent toward ell_n
    (zero-vector convention for vanishing tangents). At t = 0 this reduces
    to argmax_n <ell_n, ell>. Raises Converged when the residual norm falls
    below zero_tol or no candidate scores positive.
    """
    resid = problem.unit_target - state.alignment * state.ell_w
    resid_norm = float(np.linalg.norm(resid))
    if resid_norm <= zero_tol(problem.dimension):
        raise Converged
    d_t = resid / resid_norm

    if searcher is not None:
        n_t, score = captree_search(searcher, d_t, state.ell_w)
    else:
        scores = cap_objective(problem.unit_vectors, d_t, state.ell_w)
        n_t = int(np.argmax(scores))        # ties break to the lowest index
        score = float(scores[n_t])
    if score <= 0.0:
        raise Converged

    return IterationTrace(
        n_t=n_t,
        score=score,
        zeta0=float(problem.unit_vectors[n_t] @ problem.unit_target),
        zeta1=state.alignment,
        zeta2=float(problem.unit_vectors[n_t] @ state.ell_w),
    )


def step_size(problem: CoresetProblem, state: GigaState,
              trace: IterationTrace) -> float:
    """Closed-form geodesic line search step, clamped to [0, 1].

    gamma = (z0 - z1 z2) / ((z0 - z1 z2) + (z1 - z0 z2)); feasibility of the
    unclamped optimum holds in exact arithmetic, so clamping beyond
    CLAMP_WARN_TOL triggers a numerical warning. A vanishing denominator
    (coincident points) raises DegenerateStep.
    """
    a = trace.zeta0 - trace.zeta1 * trace.zeta2
    b = trace.zeta1 - trace.zeta0 * trace.zeta2
    denom = a + b
    if denom <= STEP_DENOM_TOL:
        raise DegenerateStep
    raw = a / denom
    gamma = min(max(raw, 0.0), 1.0)
    if abs(raw - gamma) > CLAMP_WARN_TOL:
        warnings.warn(
            f"line-search step {raw:.3e} clamped to [0, 1] at t={state.t}",
            RuntimeWarning,
        )
    trace.gamma = gamma
    return gamma


def update(problem: CoresetProblem, state: GigaState,
           trace: IterationTrace) -> GigaState:
    """Move along the geodesic and renormalize both the cached iterate and
    the weights by the same norm."""
    g = trace.gamma
    if not (0.0 <= g <= 1.0):
        raise ValueError(f"step size {g} outside [0, 1]")
    direction = (1.0 - g) * state.ell_w + g * problem.unit_vectors[trace.n_t]
    nrm = float(np.linalg.norm(direction))
    if nrm <= zero_tol(problem.dimension):
        raise RuntimeError("collapsed iterate")

    weights = state.weights * ((1.0 - g) / nrm)
    weights[trace.n_t] += g / nrm
    ell_w = direction / nrm

    t_new = state.t + 1
    if t_new % RENORM_INTERVAL == 0:
        drift = float(np.linalg.norm(ell_w))
        ell_w = ell_w / drift
        weights = weights / drift

    alignment = float(ell_w @ problem.unit_target)
    return GigaState(
        t=t_new,
        weights=weights,
        ell_w=ell_w,
        alignment=alignment,
        J=max(1.0 - alignment * alignment, 0.0),
    )


def finalize(problem: CoresetProblem, state: GigaState) -> WeightVector:
    """Rescale weights to the original vectors and the optimal global scale.

    w_n <- w_n * (||L|| / ||L_n||) * max{0, <ell(w), ell>}, with indices
    remapped to the original input positions (undoing zero-norm drops).
    """
    if problem.trivial or state.t == 0:
        return WeightVector.empty()
    factor = problem.target_norm * max(0.0, state.alignment)
    dense = state.weights * (factor / problem.norms)
    return problem.to_original(WeightVector.from_dense(dense))


def run(problem: CoresetProblem, M: int, *,
        use_captree: bool = False,
        searcher: CapNode | None = None,
        checkpoints=None) -> tuple[WeightVector, GigaDiagnostics]:
    """Run up to M greedy iterations and return finalized weights.

    Early stop ("converged" / "degenerate step") is recorded in the
    diagnostics rather than raised. When ``checkpoints`` is given, a
    finalized snapshot of the weights is captured after each listed
    iteration count (snapshots after an early stop repeat the final state).
    """
    if M < 1:
        raise ValueError("iteration budget M must be >= 1")
    diag = GigaDiagnostics()
    if problem.trivial:
        diag.stop_reason = "trivial"
        for m in sorted(set(checkpoints or [])):
            diag.snapshots[m] = WeightVector.empty()
        return WeightVector.empty(), diag

    if searcher is None and use_captree:
        searcher = build_cap_tree(problem.unit_vectors)
    cps = sorted(set(checkpoints or []))

    state = initial_state(problem)
    t_start = time.process_time()
    for _ in range(M):
        try:
            trace = select(problem, state, searcher)
            step_size(problem, state, trace)
        except Converged:
            diag.stop_reason = "converged"
            break
        except DegenerateStep:
            diag.stop_reason = "degenerate step"
            break
        state = update(problem, state, trace)
        diag.traces.append(trace)
        diag.alignments.append(state.alignment)
        diag.costs.append(state.J)
        diag.sizes.append(int(np.count_nonzero(state.weights)))
        diag.times.append(time.process_time() - t_start)
        if state.t in cps:
            diag.snapshots[state.t] = finalize(problem, state)

    final = finalize(problem, state)
    for m in cps:
        if m not in diag.snapshots and m >= state.t:
            diag.snapshots[m] = final
    return final, diag
