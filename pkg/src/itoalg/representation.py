"""Kolmogorov factorization, GNS action and the fundamental representation.

An element ``a`` is sent to the quadruple ``(l(a), k(a), k*(a), i(a))``:
a scalar, a ket in the Kolmogorov space ``C^r``, a bra, and an ``r x r``
operator. Quadruples multiply by contracting over the middle index only,
which is ordinary multiplication of the ``(r+2) x (r+2)`` triangular matrices

    [[0, bra, alpha],
     [0, op,  ket  ],
     [0, 0,   0    ]]

with rows and columns ordered ``(-, 1..r, +)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import ABS_FLOOR, Element, ItoAlgebraSpec, involve
from .errors import GNSInconsistent, GramNotPSD, RankMismatch, SpecMismatch

RANK_CUTOFF = 1e-10


@dataclass(frozen=True, eq=False)
class FundamentalRep:
    spec: ItoAlgebraSpec
    gram: np.ndarray
    rank: int
    kolmogorov: np.ndarray  # (r, n); column i is k(a_i)
    gns: np.ndarray  # (n, r, r); gns[i] = i(a_i)
    rank_cutoff: float
    eigenvalues: np.ndarray
    gns_residual: float

    def k(self, a: Element) -> np.ndarray:
        self._check(a)
        return self.kolmogorov @ a.coords

    def op(self, a: Element) -> np.ndarray:
        self._check(a)
        return np.tensordot(a.coords, self.gns, axes=1)

    def _check(self, a: Element):
        if a.spec_id != self.spec.spec_id:
            raise SpecMismatch("element does not belong to the represented algebra")


def kolmogorov_factor(g, tol, rank_cutoff=RANK_CUTOFF):
    """Rank-revealing factor ``K`` with ``K^H K = g`` for a PSD matrix.

    Returns the full eigenvalue list, ``K`` (r x n) and its pseudo-inverse.
    Eigenvalues at or below ``rank_cutoff * lam_max`` count as zero.
    """
    n = g.shape[0]
    lam, vecs = np.linalg.eigh(g)
    top = float(np.max(np.abs(lam))) if lam.size else 0.0
    if lam[0] < -max(tol * top, ABS_FLOOR):
        raise GramNotPSD(f"Gram matrix has eigenvalue {lam[0]:.3g} (largest {top:.3g})")
    keep = lam > rank_cutoff * top if top > ABS_FLOOR else np.zeros(n, dtype=bool)
    order = np.argsort(-lam[keep], kind="stable")
    lam_r = lam[keep][order]
    v_r = vecs[:, keep][:, order]
    # fixed gauge: first near-maximal component of each eigenvector is real > 0
    for col in range(v_r.shape[1]):
        mags = np.abs(v_r[:, col])
        lead = int(np.argmax(mags >= (1 - 1e-8) * mags.max()))
        v_r[:, col] *= np.conj(v_r[lead, col]) / mags[lead]
    kmat = np.sqrt(lam_r)[:, None] * v_r.conj().T
    kpinv = v_r / np.sqrt(lam_r)[None, :]
    return lam, kmat, kpinv


def build_rep(spec: ItoAlgebraSpec, rank_cutoff: float = RANK_CUTOFF) -> FundamentalRep:
    """Factor the Gram form and solve for the GNS operators.

    ``K = diag(sqrt(lam)) V^H`` over the retained eigenpairs of ``G``, and
    ``i(a_j)`` solves ``i(a_j) K = K L_j`` on the row space of ``K``. The
    solve residual is checked rather than assumed zero: a nonzero residual
    means the Gram kernel is not a left ideal.
    """
    n = spec.dim
    g = np.asarray(spec.gram)
    g = (g + g.conj().T) / 2
    lam, kmat, kpinv = kolmogorov_factor(g, spec.tol, rank_cutoff)
    r = kmat.shape[0]

    gns = np.zeros((n, r, r), dtype=complex)
    resid = 0.0
    scale = max(1.0, float(np.max(np.abs(kmat))) if kmat.size else 1.0)
    for j in range(n):
        target = kmat @ spec.left_mult[j]
        gns[j] = target @ kpinv
        if r:
            resid = max(resid, float(np.max(np.abs(gns[j] @ kmat - target))))
    resid /= scale * max(1.0, float(np.max(np.abs(spec.structure))))
    if resid > max(spec.tol, ABS_FLOOR):
        raise GNSInconsistent(f"GNS solve residual {resid:.3g}: Gram kernel is not a left ideal")
    for arr in (kmat, gns, g):
        arr.setflags(write=False)
    return FundamentalRep(spec=spec, gram=g, rank=r, kolmogorov=kmat, gns=gns,
                          rank_cutoff=rank_cutoff, eigenvalues=lam, gns_residual=resid)


@dataclass(frozen=True, eq=False)
class Quadruple:
    alpha: complex
    ket: np.ndarray  # (r,)
    bra: np.ndarray  # (r,) row vector
    op: np.ndarray  # (r, r)

    @property
    def rank(self) -> int:
        return int(self.ket.shape[0])

    def __add__(self, other):
        return Quadruple(self.alpha + other.alpha, self.ket + other.ket,
                         self.bra + other.bra, self.op + other.op)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, s):
        return Quadruple(s * self.alpha, s * self.ket, s * self.bra, s * self.op)

    def max_abs(self) -> float:
        parts = [abs(self.alpha)] + [float(np.max(np.abs(p))) for p in (self.ket, self.bra, self.op)
                                     if p.size]
        return max(parts)


def quadruple(rep: FundamentalRep, a: Element) -> Quadruple:
    rep._check(a)
    ket = rep.kolmogorov @ a.coords
    bra = (rep.kolmogorov @ involve(a).coords).conj()
    return Quadruple(complex(a.coords @ a.spec.functional), ket, bra, rep.op(a))


def convolve(q1: Quadruple, q2: Quadruple) -> Quadruple:
    """Product contracted over the middle index only."""
    if q1.rank != q2.rank:
        raise RankMismatch(f"quadruples of rank {q1.rank} and {q2.rank}")
    return Quadruple(
        alpha=complex(q1.bra @ q2.ket),
        ket=q1.op @ q2.ket,
        bra=q1.bra @ q2.op,
        op=q1.op @ q2.op,
    )


@dataclass(frozen=True, eq=False)
class TriangularMatrix:
    mat: np.ndarray

    @property
    def rank(self) -> int:
        return self.mat.shape[0] - 2

    def __matmul__(self, other: "TriangularMatrix") -> "TriangularMatrix":
        return TriangularMatrix(self.mat @ other.mat)


def to_matrix(q: Quadruple) -> TriangularMatrix:
    r = q.rank
    mat = np.zeros((r + 2, r + 2), dtype=complex)
    mat[0, r + 1] = q.alpha
    mat[0, 1:r + 1] = q.bra
    mat[1:r + 1, r + 1] = q.ket
    mat[1:r + 1, 1:r + 1] = q.op
    return TriangularMatrix(mat)


def from_matrix(t: TriangularMatrix) -> Quadruple:
    r = t.rank
    m = t.mat
    return Quadruple(complex(m[0, r + 1]), m[1:r + 1, r + 1].copy(), m[0, 1:r + 1].copy(),
                     m[1:r + 1, 1:r + 1].copy())


def minkowski_metric(r: int) -> np.ndarray:
    """Metric exchanging the - and + slots and fixing the middle ones."""
    g = np.eye(r + 2, dtype=complex)
    g[0, 0] = g[r + 1, r + 1] = 0.0
    g[0, r + 1] = g[r + 1, 0] = 1.0
    return g


def metric_adjoint(t: TriangularMatrix) -> TriangularMatrix:
    g = minkowski_metric(t.rank)
    return TriangularMatrix(g @ t.mat.conj().T @ g)


def image(rep: FundamentalRep, a: Element) -> TriangularMatrix:
    return to_matrix(quadruple(rep, a))
