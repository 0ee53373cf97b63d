"""Inner-product-space primitives for coreset construction.

Vectors are plain 1-D float64 numpy arrays; a problem instance stores the
collection (L_n), the per-vector norms sigma_n, the target sum L = sum_n L_n,
and the unit-normalized counterparts ell_n = L_n / ||L_n||, ell = L / ||L||.
All geometry is Euclidean on the stored coordinates; model-specific inner
products are absorbed into the embedding that produced the vectors.

Zero-norm convention: u / ||u|| := 0 whenever ||u|| <= zero_tol(dim), with a
scale-aware tolerance guarding against catastrophic cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ZERO_TOL_COEFF = 1e-12


def zero_tol(dim: int) -> float:
    """Scale-aware threshold below which a vector is treated as zero."""
    return ZERO_TOL_COEFF * np.sqrt(dim)


def inner(u: np.ndarray, v: np.ndarray) -> float:
    """Euclidean inner product with a dimension check."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(u @ v)


def norm(u: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(u, dtype=np.float64)))


def safe_normalize(u: np.ndarray) -> np.ndarray:
    """Return u / ||u||, or the zero vector when ||u|| <= zero_tol(dim)."""
    u = np.asarray(u, dtype=np.float64)
    n = np.linalg.norm(u)
    if n <= zero_tol(u.size):
        return np.zeros_like(u)
    return u / n


@dataclass(eq=False)
class WeightVector:
    """Sparse nonnegative weights over [0, N): (index, weight) pairs.

    Stored weights are strictly positive and indices are unique, so the
    support size ||w||_0 equals len(indices).
    """

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.indices.shape != self.values.shape or self.indices.ndim != 1:
            raise ValueError("indices and values must be equal-length 1-D arrays")
        if self.indices.size:
            if np.unique(self.indices).size != self.indices.size:
                raise ValueError("duplicate indices in weight vector")
            if np.any(self.indices < 0):
                raise ValueError("negative index in weight vector")
            if np.any(self.values <= 0) or not np.all(np.isfinite(self.values)):
                raise ValueError("stored weights must be positive and finite")

    @classmethod
    def empty(cls) -> "WeightVector":
        return cls(np.empty(0, dtype=np.int64), np.empty(0))

    @classmethod
    def from_dense(cls, w: np.ndarray) -> "WeightVector":
        w = np.asarray(w, dtype=np.float64)
        idx = np.flatnonzero(w > 0)
        return cls(idx, w[idx])

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def total(self) -> float:
        return float(self.values.sum())

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[self.indices] = self.values
        return out


@dataclass(eq=False)
class CoresetProblem:
    """Immutable problem instance: vectors, norms, target sum, unit versions.

    Zero-norm input vectors are dropped at construction; ``kept_indices`` maps
    each stored row back to its position in the original input, and
    ``n_original`` records the input count. ``trivial`` marks problems whose
    target sum has zero norm (w = 0 is optimal there).
    """

    vectors: np.ndarray       # (N, d) kept vectors L_n
    norms: np.ndarray         # (N,) sigma_n > 0
    sigma_total: float        # sigma = sum_n sigma_n
    target: np.ndarray        # (d,) L
    target_norm: float        # ||L||
    unit_vectors: np.ndarray  # (N, d) ell_n
    unit_target: np.ndarray   # (d,) ell (zero vector when trivial)
    kept_indices: np.ndarray  # (N,) original index of each kept row
    n_original: int
    trivial: bool
    _orig_to_kept: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        for arr in (self.vectors, self.norms, self.target,
                    self.unit_vectors, self.unit_target, self.kept_indices):
            arr.flags.writeable = False
        lookup = np.full(self.n_original, -1, dtype=np.int64)
        lookup[self.kept_indices] = np.arange(self.kept_indices.size)
        lookup.flags.writeable = False
        object.__setattr__(self, "_orig_to_kept", lookup)

    @property
    def n(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    def to_original(self, w: WeightVector) -> WeightVector:
        """Remap problem-space indices back to the original input indexing."""
        return WeightVector(self.kept_indices[w.indices], w.values.copy())

    def to_problem(self, w: WeightVector) -> WeightVector:
        """Remap original-input indices to problem (kept) indexing.

        Entries that landed on dropped (zero-norm) inputs are discarded;
        they contribute nothing to any weighted sum.
        """
        kept = self._orig_to_kept[w.indices]
        mask = kept >= 0
        return WeightVector(kept[mask], w.values[mask].copy())


def build_problem(vectors) -> CoresetProblem:
    """Assemble a CoresetProblem from a sequence of equal-length vectors.

    Raises ValueError on empty input or non-finite entries. Zero-norm rows
    are silently dropped (they cannot affect the objective) with the index
    remap recorded on the returned problem.
    """
    V = np.array(vectors, dtype=np.float64)
    if V.ndim == 1:
        V = V[None, :] if V.size else V.reshape(0, 0)
    if V.ndim != 2 or V.shape[0] == 0:
        raise ValueError("empty problem: need at least one input vector")
    if not np.all(np.isfinite(V)):
        raise ValueError("invalid vector: non-finite entry")

    all_norms = np.linalg.norm(V, axis=1)
    tol = zero_tol(V.shape[1])
    keep = all_norms > tol
    kept_indices = np.flatnonzero(keep)
    V_kept = np.ascontiguousarray(V[keep])
    norms_kept = all_norms[keep]

    target = V_kept.sum(axis=0) if V_kept.size else np.zeros(V.shape[1])
    target_norm = float(np.linalg.norm(target))
    sigma_total = float(norms_kept.sum())
    trivial = target_norm <= tol

    # triangle inequality must hold up to rounding in the summation
    if sigma_total < target_norm * (1 - 1e-12):
        raise AssertionError("norm sum smaller than target norm")

    unit_vectors = V_kept / norms_kept[:, None] if V_kept.size else V_kept
    unit_target = target / target_norm if not trivial else np.zeros_like(target)

    return CoresetProblem(
        vectors=V_kept,
        norms=norms_kept,
        sigma_total=sigma_total,
        target=target,
        target_norm=target_norm,
        unit_vectors=unit_vectors,
        unit_target=unit_target,
        kept_indices=kept_indices,
        n_original=int(V.shape[0]),
        trivial=trivial,
    )


def weighted_sum(problem: CoresetProblem, w: WeightVector,
                 normalized: bool = False) -> np.ndarray:
    """Compute sum_n w_n L_n (or sum_n w_n ell_n with ``normalized``).

    Indices refer to the problem's kept rows; cost is O(||w||_0 * dim).
    """
    if w.nnz == 0:
        return np.zeros(problem.dimension)
    if np.any(w.indices >= problem.n):
        raise IndexError("weight index out of range for problem")
    mat = problem.unit_vectors if normalized else problem.vectors
    return w.values @ mat[w.indices]


def coreset_sum(problem: CoresetProblem, w: WeightVector) -> np.ndarray:
    """weighted_sum for a weight vector expressed in original input indices."""
    return weighted_sum(problem, problem.to_problem(w))


def relative_error(problem: CoresetProblem, w: WeightVector) -> float:
    """||L(w) - L|| / ||L|| for original-indexed weights w."""
    err = float(np.linalg.norm(coreset_sum(problem, w) - problem.target))
    if problem.target_norm <= zero_tol(problem.dimension):
        return 0.0 if err <= zero_tol(problem.dimension) else float("inf")
    return err / problem.target_norm
