"""Grassmannian geometry of linear subspaces.

A k-dimensional subspace of R^m is represented by an orthonormal basis
(:class:`Subspace`).  Projectors are m x m symmetric idempotent matrices,
and principal angles are reported as a nondecreasing vector in [0, pi/2]
whose cosines are the singular values of ``a.basis.T @ b.basis``.

Two square distances are provided: the chordal ("Hausdorff") distance

    hausdorff_sq(a, b) = sum_i 2 * (1 - cos(theta_i))          in [0, 2k]

and its cross-covariance-weighted generalization, which replaces the
cosines by singular values of the projected weight matrix, normalized by
the mean of the weight's k largest singular values.  When the weight is a
nonzero scalar multiple of the identity the two coincide; for the zero
weight the weighted distance is defined to be the unweighted one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Subspace",
    "projector",
    "principal_angles",
    "principal_angles_from_projectors",
    "hausdorff_sq",
    "weighted_hausdorff_sq",
    "apply_isometry",
]

# Columnwise orthonormality tolerance for bases and isometries.
ORTHONORMAL_TOL = 1e-10

# Cosines may drift slightly past [0, 1]; anything worse is a real error.
_COSINE_SLACK = 1e-10

# Entrywise threshold below which a weight matrix counts as exactly zero.
_ZERO_WEIGHT_TOL = 1e-14


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional linear subspace of R^m.

    Parameters
    ----------
    basis : (m, k) ndarray
        Columns form an orthonormal basis of the subspace.  Validated to
        within ``ORTHONORMAL_TOL`` at construction; the stored array is a
        read-only copy, so instances are immutable and safe to share.
    """

    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim != 2:
            raise ValueError(f"basis must be 2-d, got shape {basis.shape}")
        m, k = basis.shape
        if not 1 <= k <= m:
            raise ValueError(f"subspace dimension must satisfy 1 <= k <= m, got k={k}, m={m}")
        gram = basis.T @ basis
        err = np.max(np.abs(gram - np.eye(k)))
        if err > ORTHONORMAL_TOL:
            raise ValueError(f"basis columns not orthonormal (max deviation {err:.3e})")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _check_compatible(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim or a.dim != b.dim:
        raise ValueError(
            "incompatible subspaces: "
            f"({a.dim} of R^{a.ambient_dim}) vs ({b.dim} of R^{b.ambient_dim})"
        )


def _clamp_cosines(sigma: np.ndarray) -> np.ndarray:
    if sigma.size and (sigma.min() < -_COSINE_SLACK or sigma.max() > 1.0 + _COSINE_SLACK):
        raise ValueError(f"cosines escape [0, 1] beyond tolerance: {sigma}")
    return np.clip(sigma, 0.0, 1.0)


def _cosines(a: Subspace, b: Subspace) -> np.ndarray:
    """Nonincreasing principal-angle cosines via the k x k inner-product matrix."""
    sigma = np.linalg.svd(a.basis.T @ b.basis, compute_uv=False)
    return _clamp_cosines(sigma)


def projector(s: Subspace) -> np.ndarray:
    """Orthogonal projector onto ``s`` as an m x m symmetric idempotent matrix."""
    return s.basis @ s.basis.T


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
    """Principal angles between two k-dimensional subspaces of R^m.

    Returns the k angles in radians, nondecreasing in [0, pi/2].  Computed
    from the SVD of the k x k matrix ``a.basis.T @ b.basis`` (O(k^3)); see
    :func:`principal_angles_from_projectors` for the equivalent m x m route.
    """
    _check_compatible(a, b)
    return np.arccos(_cosines(a, b))


def principal_angles_from_projectors(a: Subspace, b: Subspace) -> np.ndarray:
    """Principal angles via the singular values of ``projector(a) @ projector(b)``.

    Mathematically identical to :func:`principal_angles` but O(m^3); kept as
    the definitional cross-check path.
    """
    _check_compatible(a, b)
    sigma = np.linalg.svd(projector(a) @ projector(b), compute_uv=False)[: a.dim]
    return np.arccos(_clamp_cosines(sigma))


def hausdorff_sq(a: Subspace, b: Subspace) -> float:
    """Square chordal distance ``sum_i 2 (1 - cos theta_i)``; lies in [0, 2k]."""
    _check_compatible(a, b)
    return float(2.0 * np.sum(1.0 - _cosines(a, b)))


def weighted_hausdorff_sq(a: Subspace, b: Subspace, cross_cov: np.ndarray) -> float:
    """Square distance between subspaces weighted by a cross-covariance matrix.

    Parameters
    ----------
    a, b : Subspace
        Compatible k-dimensional subspaces of R^m.
    cross_cov : (m, m) ndarray
        Weight matrix, typically Cov(X, Y) of the underlying model.

    Returns
    -------
    float
        ``sum_{i<=k} 2 * (1 - sigma_i(P_a @ cross_cov @ P_b) / w)`` where
        ``w`` is the mean of the k largest singular values of ``cross_cov``.
        An (entrywise) zero weight falls back to :func:`hausdorff_sq`.  The
        value lies in [0, 2k]; it is clamped there to absorb float drift at
        the endpoints.
    """
    _check_compatible(a, b)
    c = np.asarray(cross_cov, dtype=float)
    m = a.ambient_dim
    if c.shape != (m, m):
        raise ValueError(f"cross_cov must be {m} x {m}, got {c.shape}")
    if np.max(np.abs(c)) < _ZERO_WEIGHT_TOL:
        return hausdorff_sq(a, b)
    k = a.dim
    mean_topk = np.linalg.svd(c, compute_uv=False)[:k].mean()
    # Rank of the product is at most k, so the k largest values carry it all.
    sigma = np.linalg.svd(projector(a) @ c @ projector(b), compute_uv=False)[:k]
    value = float(2.0 * np.sum(1.0 - sigma / mean_topk))
    return min(max(value, 0.0), 2.0 * k)


def apply_isometry(w: np.ndarray, b: Subspace) -> Subspace:
    """Image of a subspace under an orthogonal map: span of ``w @ b.basis``.

    The projector of the result is ``w @ projector(b) @ w.T``.
    """
    w = np.asarray(w, dtype=float)
    m = b.ambient_dim
    if w.shape != (m, m):
        raise ValueError(f"isometry must be {m} x {m}, got {w.shape}")
    err = np.max(np.abs(w.T @ w - np.eye(m)))
    if err > ORTHONORMAL_TOL:
        raise ValueError(f"matrix is not orthogonal (max deviation {err:.3e})")
    return Subspace(w @ b.basis)
