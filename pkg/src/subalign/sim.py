"""Monte Carlo harness: replicate runs, deterministic seeding, summaries.

A replicate samples one paired data set, derives the two projection
subspaces (PCA or the trivial first-k-coordinates baseline), and records
the square subspace distance, its weighted form (using the model's true
cross-covariance block), the square Procrustes fitting-error, the
predicted limiting value, and the residual.

Seeding contract
----------------
Replicate r of parameter tuple p (tuples enumerate the Cartesian product
sweep x k_values x n_values, in that nesting order) uses the 64-bit seed

    splitmix64_mix(base_seed XOR (p * 2**32 + r))

where splitmix64_mix is the standard splitmix64 finalizer (see
:func:`replicate_seed`).  The seed feeds ``numpy.random.default_rng``
(PCG64).  Replicates are therefore independent of execution order and of
the number of workers; runs with equal configs are bit-identical.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import nan
from typing import Optional, Union

import numpy as np

from .grassmann import Subspace, apply_isometry, hausdorff_sq, projector, weighted_hausdorff_sq
from .model import JointCovariance, ScientistParams, mvn_sample, scientists_covariance, scientists_sample
from .model import identity_pair, reversed_pair, spiked_diag_pair
from .pca import RankDeficientError, center, pca_subspace, trivial_subspace
from .procrustes import DegenerateProjectionError, fit_error_sq, normalize_projected
from .theory import predicted_fit_error_sq, residual, rho

__all__ = [
    "EXPERIMENTS",
    "METHODS",
    "ExperimentConfig",
    "ReplicateRecord",
    "SummaryStats",
    "replicate_seed",
    "build_models",
    "run_replicate",
    "run_experiment",
    "summarize",
]

EXPERIMENTS = ("illus1", "illus2", "illus3", "custom")
METHODS = ("pca", "trivial")

Model = Union[JointCovariance, ScientistParams]

_MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    # splitmix64 finalizer (Steele/Lea/Flood avalanche constants).
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replicate_seed(base_seed: int, param_index: int, replicate_index: int) -> int:
    """The documented per-replicate seed; see the module docstring."""
    if not 0 <= param_index < 2**32:
        raise ValueError(f"param_index must fit in 32 bits, got {param_index}")
    if not 0 <= replicate_index < 2**32:
        raise ValueError(f"replicate_index must fit in 32 bits, got {replicate_index}")
    return _mix64((base_seed & _MASK64) ^ ((param_index << 32) | replicate_index))


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one Monte Carlo sweep.

    ``sweep`` holds beta values for illus1, lambda2 values for illus2 and a
    single beta for illus3.  ``beta`` is the fixed cross-covariance scale
    where the sweep varies something else (illus2); ``lambda2`` is the fixed
    second diagonal for illus3.  ``experiment="custom"`` runs caller-built
    models: ``models`` must then be a tuple of (sweep_param, model,
    isometry-or-None) triples and ``sweep`` is ignored.
    """

    experiment: str
    m: int
    k_values: tuple[int, ...]
    n_values: tuple[int, ...]
    sweep: tuple[float, ...]
    replicates: int
    base_seed: int = 42
    method: str = "pca"
    beta: float = 0.6
    lambda2: float = 0.7
    models: Optional[tuple[tuple[float, Model, Optional[np.ndarray]], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not self.k_values or any(not 1 <= k <= self.m for k in self.k_values):
            raise ValueError(f"k values must satisfy 1 <= k <= m = {self.m}: {self.k_values}")
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise ValueError(f"n values must be >= 2: {self.n_values}")
        if self.experiment == "custom":
            if not self.models:
                raise ValueError("custom experiment requires models")
        elif not self.sweep:
            raise ValueError("sweep must be nonempty")


@dataclass(frozen=True)
class ReplicateRecord:
    """One replicate's outputs, with the config axes echoed.

    ``status`` is "ok", or a reason code ("deficient_rank",
    "degenerate_projection") for replicates whose numeric fields are None.
    ``d_sq_corrected`` is the square distance after undoing the model's
    isometry (illus3 only), None elsewhere.
    """

    experiment: str
    method: str
    m: int
    k: int
    n: int
    sweep_param: float
    replicate: int
    d_sq: Optional[float]
    eth_sq: Optional[float]
    eps_sq: Optional[float]
    predicted: Optional[float]
    residual: Optional[float]
    d_sq_corrected: Optional[float] = None
    status: str = "ok"


def build_models(cfg: ExperimentConfig) -> list[tuple[float, Model, Optional[np.ndarray]]]:
    """Materialize the sweep's models (validating feasibility) before any work."""
    if cfg.experiment == "illus1":
        return [(b, identity_pair(cfg.m, b), None) for b in cfg.sweep]
    if cfg.experiment == "illus2":
        return [(lam, spiked_diag_pair(cfg.m, lam, cfg.beta), None) for lam in cfg.sweep]
    if cfg.experiment == "illus3":
        out = []
        for b in cfg.sweep:
            jc, w = reversed_pair(cfg.m, cfg.lambda2, b)
            out.append((b, jc, w))
        return out
    return list(cfg.models)


def run_replicate(
    model: Model,
    k: int,
    n: int,
    method: str,
    seed: int,
    *,
    isometry: Optional[np.ndarray] = None,
    experiment: str = "custom",
    sweep_param: float = nan,
    replicate: int = 0,
) -> ReplicateRecord:
    """Sample one paired data set and evaluate all per-replicate quantities.

    Rank-deficient PCA and degenerate (zero) projections yield a failed
    record with a reason code rather than raising; these have probability
    zero under continuous models with n > k but occur at extreme settings
    (e.g. n <= k).
    """
    rng = np.random.default_rng(seed)
    if isinstance(model, ScientistParams):
        jc = scientists_covariance(model)
        pair = scientists_sample(model, n, rng)
    else:
        jc = model
        pair = mvn_sample(jc, n, rng)
    m = jc.m
    echo = dict(
        experiment=experiment, method=method, m=m, k=k, n=n,
        sweep_param=sweep_param, replicate=replicate,
    )
    try:
        cx = center(pair.x)
        cy = center(pair.y)
        if method == "pca":
            sub_a = pca_subspace(cx, k)
            sub_b = pca_subspace(cy, k)
        else:
            sub_a = trivial_subspace(m, k)
            sub_b = sub_a
        d_sq = hausdorff_sq(sub_a, sub_b)
        eth_sq = weighted_hausdorff_sq(sub_a, sub_b, jc.cov_xy)
        x_norm = normalize_projected(projector(sub_a), cx.matrix, k)
        y_norm = normalize_projected(projector(sub_b), cy.matrix, k)
        eps_sq = fit_error_sq(x_norm, y_norm)
        predicted = predicted_fit_error_sq(rho(jc, k), k, eth_sq)
        d_sq_corrected = (
            hausdorff_sq(sub_a, apply_isometry(isometry, sub_b)) if isometry is not None else None
        )
    except RankDeficientError:
        return ReplicateRecord(**echo, d_sq=None, eth_sq=None, eps_sq=None,
                               predicted=None, residual=None, status="deficient_rank")
    except DegenerateProjectionError:
        return ReplicateRecord(**echo, d_sq=None, eth_sq=None, eps_sq=None,
                               predicted=None, residual=None, status="degenerate_projection")
    return ReplicateRecord(
        **echo, d_sq=d_sq, eth_sq=eth_sq, eps_sq=eps_sq, predicted=predicted,
        residual=residual(eps_sq, predicted), d_sq_corrected=d_sq_corrected,
    )


def _run_task(task) -> ReplicateRecord:
    model, w, k, n, seed, echo = task
    return run_replicate(model, k, n, echo["method"], seed, isometry=w,
                         experiment=echo["experiment"], sweep_param=echo["sweep_param"],
                         replicate=echo["replicate"])


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[ReplicateRecord]:
    """Run the full sweep; records are ordered by (parameter tuple, replicate).

    ``workers > 1`` fans replicates out to a process pool; because every
    replicate is a pure function of its derived seed, the output is
    identical at any worker count.
    """
    models = build_models(cfg)
    tasks = []
    param_index = 0
    for sweep_param, model, w in models:
        for k in cfg.k_values:
            for n in cfg.n_values:
                for rep in range(cfg.replicates):
                    echo = dict(experiment=cfg.experiment, method=cfg.method,
                                sweep_param=sweep_param, replicate=rep)
                    seed = replicate_seed(cfg.base_seed, param_index, rep)
                    tasks.append((model, w, k, n, seed, echo))
                param_index += 1
    if workers <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (workers * 8))
        return list(pool.map(_run_task, tasks, chunksize=chunk))


@dataclass(frozen=True)
class SummaryStats:
    """Per-group sample statistics over the ok replicates.

    ``group`` pairs each group-by field with its value.  Standard
    deviations use the n - 1 denominator; a single-member group reports 0
    with ``single_sample`` set.  Failed replicates are excluded and counted
    in ``failed``.
    """

    group: tuple[tuple[str, object], ...]
    count: int
    failed: int
    mean_eps_sq: float
    stdev_eps_sq: float
    mean_eps_sq_over_2k: float
    stdev_eps_sq_over_2k: float
    mean_residual: float
    stdev_residual: float
    single_sample: bool = False

    def as_dict(self) -> dict:
        out = dict(self.group)
        for field in ("count", "failed", "mean_eps_sq", "stdev_eps_sq",
                      "mean_eps_sq_over_2k", "stdev_eps_sq_over_2k",
                      "mean_residual", "stdev_residual", "single_sample"):
            out[field] = getattr(self, field)
        return out


_DEFAULT_GROUP_BY = ("method", "m", "k", "n", "sweep_param")


def _mean_stdev(values: np.ndarray) -> tuple[float, float]:
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1))


def summarize(
    records: list[ReplicateRecord],
    group_by: tuple[str, ...] = _DEFAULT_GROUP_BY,
) -> list[SummaryStats]:
    """Group records and report mean/stdev of eps^2, eps^2 / 2k, and residuals."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[ReplicateRecord]] = {}
    for rec in records:
        key = tuple((f, getattr(rec, f)) for f in group_by)
        groups.setdefault(key, []).append(rec)
    out = []
    for key, recs in groups.items():
        ok = [r for r in recs if r.status == "ok"]
        failed = len(recs) - len(ok)
        if not ok:
            out.append(SummaryStats(key, 0, failed, nan, nan, nan, nan, nan, nan))
            continue
        eps = np.array([r.eps_sq for r in ok])
        ratio = np.array([r.eps_sq / (2.0 * r.k) for r in ok])
        resid = np.array([r.residual for r in ok])
        mean_e, sd_e = _mean_stdev(eps)
        mean_r, sd_r = _mean_stdev(ratio)
        mean_res, sd_res = _mean_stdev(resid)
        out.append(SummaryStats(key, len(ok), failed, mean_e, sd_e, mean_r, sd_r,
                                mean_res, sd_res, single_sample=len(ok) == 1))
    return out
