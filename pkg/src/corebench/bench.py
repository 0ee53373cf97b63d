"""Benchmark harness: dataset generation, construction sweeps, CSV output.

Experiments (desk-scale defaults in parentheses):

* ``synth-gauss``   -- Gaussian unknown-mean study (N=10 observations,
  1000 trials, budget 1): size-1 coresets per algorithm, reporting the
  relative error of the coreset posterior variance in the ``extra`` column.
* ``synth-vectors`` -- i.i.d. standard normal vectors (N=10^4, dim=50,
  20 trials, budgets 1..1000).
* ``ortho``         -- axis-aligned vectors L_n = (1/N) e_n (N=1000), the
  construction where simplex-constrained methods have error sqrt(N/M - 1).
* ``regress``       -- logistic/Poisson regression with a Laplace fit and
  random-feature projection; errors are measured in the projected space.

Budgets are swept over a log-spaced grid {1, ..., m_max}. Randomness is
split into named PCG64 streams: trial t of a run with root seed s uses
``SeedSequence(s, spawn_key=(t, k))`` with k = 0 for data, 1 for importance
sampling, 2 for uniform subsampling, and 3 for the projection draw, so every
row is reproducible bit-for-bit (timing columns aside). Trials may run
concurrently (COREBENCH_THREADS); rows are always emitted in
(trial, algorithm, M) order.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import baselines, giga
from .hilbert import CoresetProblem, WeightVector, build_problem, relative_error
from .models import (
    GaussianMeanData,
    ProjectionConfig,
    RegressionData,
    coreset_posterior_variance,
    default_sample_count,
    gaussian_embed,
    laplace,
    project,
)

EXPERIMENTS = ("synth-gauss", "synth-vectors", "ortho", "regress")
ALGORITHMS = ("giga", "fw", "is", "rnd")
CSV_COLUMNS = ("trial", "algorithm", "M", "rel_error", "size", "cpu_seconds", "extra")

_STREAM_DATA, _STREAM_IS, _STREAM_RND, _STREAM_PROJ = 0, 1, 2, 3


class DataError(Exception):
    """Malformed input data (CSV schema violations and the like)."""


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    n: int
    dim: int
    m_max: int
    trials: int
    seed: int
    algorithms: tuple[str, ...] = ALGORITHMS
    model: str = "logistic"
    input_path: str | None = None
    label_col: str = "y"
    standardize: bool = False
    proj_samples: int | None = None
    use_captree: bool = False
    out_path: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")


@dataclass(frozen=True)
class ResultRow:
    trial: int
    algorithm: str
    M: int
    rel_error: float
    size: int
    cpu_seconds: float
    extra: float | None = None


def log_grid(m_max: int, points: int = 20) -> list[int]:
    """Strictly increasing log-spaced integer budgets from 1 to m_max."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if m_max == 1:
        return [1]
    vals = np.unique(np.round(np.geomspace(1.0, m_max, points)).astype(int))
    return sorted(set(vals[(vals >= 1) & (vals <= m_max)].tolist()) | {1, m_max})


def _stream(seed: int, trial: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, purpose)))


def _stream_seed(seed: int, trial: int, purpose: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(trial, purpose))
               .generate_state(1, np.uint64)[0])


def _checkpoint_time(times: list[float], m: int) -> float:
    if not times:
        return 0.0
    return times[min(m, len(times)) - 1]


def _construction_rows(problem: CoresetProblem, spec: ExperimentSpec, trial: int,
                       grid: list[int], extra_fn=None) -> list[ResultRow]:
    """Run every requested algorithm over the budget grid and collect rows."""
    rows = []

    def emit(alg, m, weights, cpu):
        extra = extra_fn(weights) if extra_fn is not None else None
        rows.append(ResultRow(
            trial=trial,
            algorithm=alg,
            M=m,
            rel_error=relative_error(problem, weights),
            size=weights.nnz,
            cpu_seconds=cpu,
            extra=extra,
        ))

    for alg in spec.algorithms:
        if alg == "giga":
            _, diag = giga.run(problem, grid[-1], use_captree=spec.use_captree,
                               checkpoints=grid)
            for m in grid:
                emit(alg, m, diag.snapshots[m], _checkpoint_time(diag.times, m))
        elif alg == "fw":
            _, diag = baselines.fw_coreset(problem, grid[-1], checkpoints=grid)
            for m in grid:
                emit(alg, m, diag.snapshots[m], _checkpoint_time(diag.times, m))
        elif alg == "is":
            alg_seed = _stream_seed(spec.seed, trial, _STREAM_IS)
            for m in grid:
                t0 = time.process_time()
                w = baselines.is_coreset(problem, m, alg_seed)
                emit(alg, m, w, time.process_time() - t0)
        else:
            alg_seed = _stream_seed(spec.seed, trial, _STREAM_RND)
            for m in grid:
                t0 = time.process_time()
                w = baselines.rnd_coreset(problem, m, alg_seed)
                emit(alg, m, w, time.process_time() - t0)
    return rows


# --- experiment trial bodies ---

def _gauss_rows(y: np.ndarray, spec: ExperimentSpec, trial: int,
                grid: list[int]) -> list[ResultRow]:
    data = GaussianMeanData(y)
    problem = gaussian_embed(data)
    v_exact = 1.0 / (data.n + 1)

    def variance_error(weights: WeightVector) -> float:
        _, v = coreset_posterior_variance(data, weights)
        return abs(v - v_exact) / v_exact

    return _construction_rows(problem, spec, trial, grid, extra_fn=variance_error)


def run_synth_gauss(spec: ExperimentSpec) -> list[ResultRow]:
    grid = log_grid(spec.m_max)

    def one_trial(trial: int) -> list[ResultRow]:
        rng = _stream(spec.seed, trial, _STREAM_DATA)
        mu = rng.normal()
        y = rng.normal(mu, 1.0, size=spec.n)
        return _gauss_rows(y, spec, trial, grid)

    return _over_trials(spec, one_trial)


def run_synth_vectors(spec: ExperimentSpec) -> list[ResultRow]:
    grid = log_grid(spec.m_max)

    def one_trial(trial: int) -> list[ResultRow]:
        rng = _stream(spec.seed, trial, _STREAM_DATA)
        vectors = rng.normal(size=(spec.n, spec.dim))
        problem = build_problem(vectors)
        return _construction_rows(problem, spec, trial, grid)

    return _over_trials(spec, one_trial)


def ortho_problem(n: int) -> CoresetProblem:
    """Axis-aligned construction: L_n = (1/n) e_n, so sigma = 1, ||L|| = 1/sqrt(n)."""
    return build_problem(np.eye(n) / n)


def run_ortho(spec: ExperimentSpec) -> list[ResultRow]:
    grid = log_grid(spec.m_max)
    problem = ortho_problem(spec.n)

    def one_trial(trial: int) -> list[ResultRow]:
        return _construction_rows(problem, spec, trial, grid)

    return _over_trials(spec, one_trial)


def synth_regression_data(model: str, n: int, rng: np.random.Generator) -> RegressionData:
    """Synthetic regression draws: logistic has x in R^2 and true parameter
    [3, 3, 0]; Poisson has x in R^1 and true parameter [1, 0]."""
    if model == "logistic":
        x = rng.normal(size=(n, 2))
        u = x @ np.array([3.0, 3.0])          # intercept is 0
        y = np.where(rng.random(n) < expit(u), 1.0, -1.0)
    elif model == "poisson":
        x = rng.normal(size=(n, 1))
        y = rng.poisson(np.logaddexp(0.0, x[:, 0])).astype(float)
    else:
        raise ValueError(f"no synthetic generator for model {model!r}")
    return RegressionData(x, y)


def run_regress(spec: ExperimentSpec) -> list[ResultRow]:
    grid = log_grid(spec.m_max)
    if spec.input_path is not None:
        data = load_csv(spec.input_path, spec.label_col, spec.model,
                        standardize=spec.standardize)
    else:
        data = synth_regression_data(spec.model, spec.n,
                                     _stream(spec.seed, 0, _STREAM_DATA))
    lap = laplace(spec.model, data)
    param_dim = data.d + 1
    samples = spec.proj_samples or default_sample_count(param_dim)

    def one_trial(trial: int) -> list[ResultRow]:
        cfg = ProjectionConfig(samples, seed=_stream_seed(spec.seed, trial, _STREAM_PROJ))
        problem = project(spec.model, data, lap, cfg)
        return _construction_rows(problem, spec, trial, grid)

    return _over_trials(spec, one_trial)


_RUNNERS = {
    "synth-gauss": run_synth_gauss,
    "synth-vectors": run_synth_vectors,
    "ortho": run_ortho,
    "regress": run_regress,
}


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("COREBENCH_THREADS", "1")))
    except ValueError:
        return 1


def _over_trials(spec: ExperimentSpec, one_trial) -> list[ResultRow]:
    workers = min(_thread_cap(), spec.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(one_trial, range(spec.trials)))
    else:
        chunks = [one_trial(t) for t in range(spec.trials)]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.trial, r.algorithm, r.M))
    return rows


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    return _RUNNERS[spec.experiment](spec)


# --- CSV input/output ---

def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            r.trial, r.algorithm, r.M, repr(r.rel_error), r.size,
            repr(r.cpu_seconds), "" if r.extra is None else repr(r.extra),
        ])
    return buf.getvalue()


def write_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def load_csv(path: str, label_column: str, model: str,
             standardize: bool = False) -> RegressionData:
    """Read a regression dataset from a headered CSV file.

    All non-label columns are treated as numeric features. Logistic labels
    may be coded {0, 1} (mapped to {-1, +1}) or {-1, +1} directly; Poisson
    labels must be nonnegative integers. Schema problems raise DataError
    with the offending file line number (the header is line 1). With
    ``standardize``, features are shifted/scaled to mean 0 and variance 1
    (constant columns are only centered).
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found "
                            f"(columns: {', '.join(header)})")
        label_idx = header.index(label_column)
        feature_idx = [i for i in range(len(header)) if i != label_idx]
        if not feature_idx:
            raise DataError(f"{path}: no feature columns besides the label")

        xs, ys = [], []
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise DataError(f"{path}: row {line_no} has {len(record)} fields, "
                                f"expected {len(header)}")
            try:
                values = [float(c) for c in record]
            except ValueError:
                bad = next(c for c in record if not _is_float(c))
                raise DataError(f"{path}: row {line_no}: non-numeric value "
                                f"{bad.strip()!r}") from None
            xs.append([values[i] for i in feature_idx])
            ys.append(values[label_idx])
    if not ys:
        raise DataError(f"{path}: no data rows")

    x = np.asarray(xs)
    y = np.asarray(ys)
    if model == "logistic":
        present = set(np.unique(y).tolist())
        if present <= {-1.0, 1.0}:
            pass
        elif present <= {0.0, 1.0}:
            y = np.where(y == 0.0, -1.0, 1.0)
        else:
            raise DataError(f"{path}: logistic labels must be coded "
                            f"{{0,1}} or {{-1,1}}, got {sorted(present)}")
    elif model == "poisson":
        if np.any(y < 0) or np.any(y != np.round(y)):
            raise DataError(f"{path}: poisson labels must be nonnegative integers")
    if standardize:
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        x = (x - mean) / np.where(std > 0, std, 1.0)
    try:
        return RegressionData(x, y)
    except ValueError as exc:        # e.g. a parsed "nan" cell
        raise DataError(f"{path}: {exc}") from exc


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False
