"""Numeric rank, kernels and subspace comparisons with audit data.

Ranks use a relative singular-value cutoff; every dimension decision
also reports the gap (smallest kept singular value over largest
dropped).  A gap under 1e3 means the dimension is not clearly resolved
and callers flag the result instead of silently choosing.
"""

from dataclasses import dataclass

import numpy as np

GAP_MIN = 1e3


@dataclass
class RankResult:
    rank: int
    gap: float
    singular_values: np.ndarray

    @property
    def indeterminate(self):
        return self.gap < GAP_MIN


def numeric_rank(svals, rank_tol=1e-8):
    svals = np.asarray(svals, dtype=float)
    if svals.size == 0 or svals[0] == 0.0:
        return RankResult(0, np.inf, svals)
    cutoff = rank_tol * svals[0]
    rank = int(np.sum(svals > cutoff))
    if rank == svals.size or svals[rank] == 0.0:
        gap = np.inf
    elif rank == 0:
        gap = 0.0
    else:
        gap = float(svals[rank - 1] / svals[rank])
    return RankResult(rank, gap, svals)


def null_space(M, rank_tol=1e-8):
    """Orthonormal kernel basis plus the rank audit."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    _, s, vh = np.linalg.svd(M)
    svals = np.concatenate([s, np.zeros(max(0, M.shape[1] - s.size))])
    rk = numeric_rank(svals, rank_tol)
    return vh[rk.rank:].conj().T, rk


def orth(A, rank_tol=1e-12):
    """Orthonormal basis of the column span."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return u[:, :0]
    keep = int(np.sum(s > rank_tol * s[0]))
    return u[:, :keep]


def principal_angles(U, V):
    """Principal angles (radians) between the column spans."""
    U = orth(U)
    V = orth(V)
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros(0)
    sv = np.linalg.svd(U.conj().T @ V, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


def intersect_subspaces(U, V, rank_tol=1e-8):
    """Orthonormal basis of the intersection of two column spans.

    Returns (basis, dimension, rank audit of the concatenation); the
    dimension is dim U + dim V - rank [U V].
    """
    U = orth(U)
    V = orth(V)
    if U.shape[1] == 0 or V.shape[1] == 0:
        return U[:, :0], 0, numeric_rank(np.array([1.0]), rank_tol)
    stacked = np.hstack([U, V])
    s = np.linalg.svd(stacked, compute_uv=False)
    rk = numeric_rank(s, rank_tol)
    dim = U.shape[1] + V.shape[1] - rk.rank
    if dim <= 0:
        return U[:, :0], 0, rk
    null, _ = null_space(np.hstack([U, -V]), rank_tol)
    basis = orth(U @ null[: U.shape[1], :])
    return basis, dim, rk
