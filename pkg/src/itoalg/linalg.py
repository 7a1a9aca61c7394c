"""Small subspace utilities shared by the representation and structure code.

Subspaces are passed around as ``(n, k)`` arrays whose columns span them.
"""

import numpy as np
from scipy.linalg import subspace_angles

RANK_RTOL = 1e-10
RANK_ATOL = 1e-9
ANGLE_TOL = 1e-8


def orth(vectors, rtol=RANK_RTOL, atol=RANK_ATOL):
    """Orthonormal basis for the column span of ``vectors``.

    Singular values below ``max(rtol * s_max, atol)`` are dropped, so a set of
    numerically zero columns yields an empty ``(n, 0)`` basis.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    n = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((n, 0), dtype=complex)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0:
        return np.zeros((n, 0), dtype=complex)
    keep = s > max(rtol * s[0], atol)
    return u[:, keep]


def null_space(matrix, rtol=RANK_RTOL, atol=RANK_ATOL):
    """Orthonormal basis of the kernel of ``matrix`` (columns)."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    n = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(matrix, full_matrices=True)
    cutoff = max(rtol * (s[0] if s.size else 0.0), atol)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].conj().T


def max_angle(a, b):
    """Largest principal angle between two column spans (0 if both empty).

    Spans of different dimension are reported as pi/2 apart.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[1] != b.shape[1]:
        return np.pi / 2
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(subspace_angles(a, b)))


def same_subspace(a, b, tol=ANGLE_TOL):
    return max_angle(a, b) < tol


def contains(big, small, tol=ANGLE_TOL):
    """True if every column of ``small`` lies in the span of ``big``."""
    small = np.asarray(small, dtype=complex)
    if small.shape[1] == 0:
        return True
    q = orth(big)
    resid = small - q @ (q.conj().T @ small)
    scale = max(1.0, float(np.max(np.abs(small))))
    return float(np.max(np.abs(resid))) <= tol * scale


def join(*spans):
    """Orthonormal basis of the sum of several subspaces."""
    cols = [np.asarray(s, dtype=complex) for s in spans if np.asarray(s).shape[1]]
    if not cols:
        n = np.asarray(spans[0]).shape[0]
        return np.zeros((n, 0), dtype=complex)
    return orth(np.hstack(cols))


def relative_residual(diff, *scales):
    """max|diff| divided by the largest magnitude among ``scales`` (floor 1)."""
    diff = np.asarray(diff)
    if diff.size == 0:
        return 0.0
    scale = 1.0
    for s in scales:
        s = np.asarray(s)
        if s.size:
            scale = max(scale, float(np.max(np.abs(s))))
    return float(np.max(np.abs(diff))) / scale
