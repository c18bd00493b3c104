"""Column-centering and top-k PCA subspace extraction.

The PCA subspace of an m x n centered matrix is the span of the k left
singular vectors of its thin SVD (equivalently, the top-k eigenvectors of
the sample covariance, but computed from the data matrix for stability).
The "trivial" subspace span{e_1, ..., e_k} is the PCA-free baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grassmann import Subspace

__all__ = [
    "RankDeficientError",
    "CenteredData",
    "center",
    "pca_subspace",
    "trivial_subspace",
]


class RankDeficientError(ValueError):
    """The data has fewer nonzero singular values than the requested dimension."""


@dataclass(frozen=True)
class CenteredData:
    """An m x n data matrix (features x observations) with zero row means."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-d, got shape {matrix.shape}")
        n = matrix.shape[1]
        worst = np.max(np.abs(matrix.sum(axis=1))) if matrix.size else 0.0
        if worst > 1e-8 * n:
            raise ValueError(f"rows are not centered (max |row sum| = {worst:.3e})")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


def center(data: np.ndarray) -> CenteredData:
    """Remove each row's mean (right-multiplication by the centering matrix)."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"data must be 2-d, got shape {data.shape}")
    if data.shape[1] < 2:
        raise ValueError("need at least 2 observations to center")
    return CenteredData(data - data.mean(axis=1, keepdims=True))


def _fix_signs(basis: np.ndarray) -> np.ndarray:
    # Reproducible representative: make the first nonzero entry of each
    # column positive.  Subspace-level quantities are unaffected.
    basis = basis.copy()
    for j in range(basis.shape[1]):
        nonzero = np.flatnonzero(np.abs(basis[:, j]) > 1e-12)
        if nonzero.size and basis[nonzero[0], j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


def pca_subspace(c: CenteredData, k: int) -> Subspace:
    """Span of the k left singular vectors with the largest singular values.

    Ties at the k-th singular value are broken by the (deterministic) order
    the SVD routine returns, so under near-ties the result is driven by
    sampling noise; that instability is a property of PCA itself, not a
    defect to smooth over.

    Raises
    ------
    RankDeficientError
        If the numerical rank of ``c`` is below ``k``.
    """
    m = c.m
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    u, s, _ = np.linalg.svd(c.matrix, full_matrices=False)
    tol = s[0] * max(c.matrix.shape) * np.finfo(float).eps
    rank = int(np.count_nonzero(s > tol))
    if rank < k:
        raise RankDeficientError(
            f"deficient rank for requested dimension: rank {rank} < k = {k}"
        )
    return Subspace(_fix_signs(u[:, :k]))


def trivial_subspace(m: int, k: int) -> Subspace:
    """span{e_1, ..., e_k} in R^m: first k coordinates, ignore the rest."""
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    return Subspace(np.eye(m)[:, :k])
