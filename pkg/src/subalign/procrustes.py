"""Orthogonal Procrustes fitting-error between projected, normalized data sets.

Each data set enters as a projected matrix rescaled to Frobenius norm
sqrt(k) (:class:`NormalizedProjection`).  The square fitting-error

    min_{Q orthogonal} || Q x - y ||_F^2  =  2k - 2 * nuclear_norm(y @ x.T)

is evaluated through the closed nuclear-norm form, never by explicit
minimization; :func:`optimal_rotation` exposes the minimizer itself for
diagnostics and cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateProjectionError",
    "NormalizedProjection",
    "normalize_projected",
    "fit_error_sq",
    "optimal_rotation",
]

_NORM_TOL = 1e-9


class DegenerateProjectionError(ValueError):
    """The projected data is zero, so the sqrt(k) rescaling is undefined."""


@dataclass(frozen=True)
class NormalizedProjection:
    """An m x n projected data matrix with Frobenius norm sqrt(scale_dim)."""

    matrix: np.ndarray
    scale_dim: int

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-d, got shape {matrix.shape}")
        if self.scale_dim < 1:
            raise ValueError(f"scale_dim must be >= 1, got {self.scale_dim}")
        fro = np.linalg.norm(matrix)
        target = np.sqrt(self.scale_dim)
        if abs(fro - target) > _NORM_TOL:
            raise ValueError(
                f"Frobenius norm {fro!r} differs from sqrt(scale_dim) = {target!r}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


def normalize_projected(p: np.ndarray, centered_data: np.ndarray, k: int) -> NormalizedProjection:
    """Project ``centered_data`` through ``p`` and rescale to Frobenius norm sqrt(k).

    Parameters
    ----------
    p : (m, m) ndarray
        Orthogonal projector (see :func:`subalign.grassmann.projector`).
    centered_data : (m, n) ndarray
        Column-centered data matrix.
    k : int
        Dimension of the projection subspace; sets the sqrt(k) scale.

    Raises
    ------
    DegenerateProjectionError
        If the projected data has zero Frobenius norm.
    """
    p = np.asarray(p, dtype=float)
    data = np.asarray(centered_data, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"projector must be square, got shape {p.shape}")
    if data.ndim != 2 or data.shape[0] != p.shape[0]:
        raise ValueError(
            f"data shape {data.shape} incompatible with projector shape {p.shape}"
        )
    projected = p @ data
    fro = np.linalg.norm(projected)
    if fro < 1e-150:
        raise DegenerateProjectionError("degenerate projection: projected data is zero")
    return NormalizedProjection(np.sqrt(k) / fro * projected, k)


def _check_pair(x: NormalizedProjection, y: NormalizedProjection) -> None:
    if x.matrix.shape != y.matrix.shape:
        raise ValueError(f"shape mismatch: {x.matrix.shape} vs {y.matrix.shape}")
    if x.scale_dim != y.scale_dim:
        raise ValueError(f"scale_dim mismatch: {x.scale_dim} vs {y.scale_dim}")


def fit_error_sq(x: NormalizedProjection, y: NormalizedProjection) -> float:
    """Square orthogonal Procrustes fitting-error between two normalized projections.

    Equals ``2k - 2 * sum_i sigma_i(y @ x.T)`` with the sum over all
    singular values; the result is clamped to its exact range [0, 2k]
    (float drift can produce e.g. -1e-12 at a perfect fit).
    """
    _check_pair(x, y)
    k = x.scale_dim
    nuclear = np.linalg.svd(y.matrix @ x.matrix.T, compute_uv=False).sum()
    return min(max(float(2.0 * k - 2.0 * nuclear), 0.0), 2.0 * k)


def optimal_rotation(x: NormalizedProjection, y: NormalizedProjection) -> np.ndarray:
    """The orthogonal matrix minimizing ``|| Q x - y ||_F``.

    Closed form: with ``y @ x.T = U S V^T``, the minimizer is ``Q = U V^T``
    (orthogonal but not restricted to determinant +1).  Provided for tests
    and diagnostics; :func:`fit_error_sq` never calls it.
    """
    _check_pair(x, y)
    u, _, vt = np.linalg.svd(y.matrix @ x.matrix.T)
    return u @ vt
