"""Null ideals, the supporting idempotent and the Brownian/Levy splitting.

Every Ito algebra splits as ``a = alpha*theta + b + c`` with ``b`` in a
second-order nilpotent (Brownian) part and ``c`` in the part carrying a
nondegenerate operator representation (Levy), and ``bc = 0 = cb``. The
general route goes through a self-adjoint idempotent ``f`` whose GNS image
is the unit of the operator algebra: ``c = af + fa - faf``. Vacuum and
thermal algebras also admit direct constructions, used as cross-checks.

Inner products: ``<a|b>_+ = l(a* b)`` and ``<a|b>^- = l(a b*)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import ABS_FLOOR, Element, ItoAlgebraSpec, functional, involve, multiply
from .builders import THERMAL, VACUUM
from .errors import NoUnit, NotIdempotent, NotThermalBuilder, NotVacuumBuilder
from .linalg import ANGLE_TOL, join, max_angle, null_space, orth, same_subspace
from .representation import FundamentalRep, build_rep


@dataclass(frozen=True, eq=False)
class IdealData:
    n_plus: np.ndarray  # {c : |c|_+ = 0}, columns
    n_minus: np.ndarray  # {b : |b|^- = 0}
    n_op: np.ndarray  # {a : i(a) = 0}
    k_minus: np.ndarray  # {a : <a|b>_+ = 0 for all b in n_minus}
    k_plus: np.ndarray  # right orthogonal complement of n_plus


def null_ideals(spec: ItoAlgebraSpec, rep: FundamentalRep) -> IdealData:
    n = spec.dim
    r = rep.rank
    n_plus = null_space(rep.kolmogorov) if r else np.eye(n, dtype=complex)
    # conjugate-linear image under the involution
    n_minus = orth(spec.involution.T @ n_plus.conj()) if n_plus.shape[1] else n_plus
    if r:
        n_op = null_space(rep.gns.reshape(n, r * r).T)
    else:
        n_op = np.eye(n, dtype=complex)
    # <d|c>^- = d^T H conj(c) = 0 for all c in n_plus
    h = np.asarray(spec.gram_minus)
    k_plus = null_space((h @ n_plus.conj()).T) if n_plus.shape[1] else np.eye(n, dtype=complex)
    # <a|b>_+ = a^H G b = 0 for all b in n_minus
    g = np.asarray(spec.gram)
    k_minus = null_space((g @ n_minus).conj().T) if n_minus.shape[1] else np.eye(n, dtype=complex)
    return IdealData(n_plus=n_plus, n_minus=n_minus, n_op=n_op, k_minus=k_minus, k_plus=k_plus)


def is_vacuum(spec: ItoAlgebraSpec, ideals: IdealData) -> bool:
    """Vacuum algebras are those whose right complement of n_+ is n^-."""
    return same_subspace(ideals.k_plus, ideals.n_minus)


def is_thermal(spec: ItoAlgebraSpec, ideals: IdealData) -> bool:
    """Thermal algebras have n_+ = C theta = n^-."""
    theta = spec.death.reshape(-1, 1)
    return same_subspace(ideals.n_plus, theta) and same_subspace(ideals.n_minus, theta)


# --------------------------------------------------------------------------
# supporting idempotent


def unit_projector(rep: FundamentalRep) -> np.ndarray:
    """Unit ``E`` of the operator algebra spanned by the GNS matrices.

    Solved as the element of the span with ``E i(a_j) = i(a_j) = i(a_j) E``.
    """
    n, r = rep.spec.dim, rep.rank
    if r == 0:
        return np.zeros((0, 0), dtype=complex)
    ops = np.asarray(rep.gns)
    left = np.einsum("jpq,iqs->ipsj", ops, ops).reshape(n * r * r, n)
    right = np.einsum("ipq,jqs->ipsj", ops, ops).reshape(n * r * r, n)
    rhs = np.concatenate([ops.reshape(-1), ops.reshape(-1)])
    t, *_ = np.linalg.lstsq(np.vstack([left, right]), rhs, rcond=None)
    e = np.tensordot(t, ops, axes=1)
    scale = max(1.0, float(np.max(np.abs(ops))) ** 2)
    resid = 0.0
    for j in range(n):
        resid = max(resid, float(np.max(np.abs(e @ ops[j] - ops[j]))),
                    float(np.max(np.abs(ops[j] @ e - ops[j]))))
    if resid > max(rep.spec.tol * scale, ABS_FLOOR):
        raise NoUnit(f"operator algebra has no unit (residual {resid:.3g})")
    return (e + e.conj().T) / 2


def supporting_idempotent(spec: ItoAlgebraSpec, rep: FundamentalRep,
                          ideals: Optional[IdealData] = None,
                          perturbation: Optional[Element] = None) -> Element:
    """Self-adjoint idempotent ``f`` with ``i(f) = E``.

    A preimage ``e`` of ``E`` satisfies ``e^3 = e^2 + mu*theta`` with
    ``mu = l(e^3) - l(e^2)`` (from ``aec = ac - l(ac - aec) theta``), so
    ``f = e^2 + mu*theta`` is idempotent. ``perturbation`` (an element of the
    null ideal ``{i(z) = 0}``) shifts the preimage; used to test that the
    resulting splitting does not depend on that choice.
    """
    n, r = spec.dim, rep.rank
    if r == 0:
        return spec.zero()
    e_op = unit_projector(rep)
    ops = np.asarray(rep.gns).reshape(n, r * r).T
    coords, *_ = np.linalg.lstsq(ops, e_op.reshape(-1), rcond=None)
    e0 = spec.element(coords)
    if perturbation is not None:
        if np.max(np.abs(rep.op(perturbation))) > max(spec.tol, ABS_FLOOR):
            raise ValueError("perturbation must lie in the null ideal {i(z) = 0}")
        e0 = e0 + perturbation
    e0 = 0.5 * (e0 + involve(e0))
    e2 = multiply(e0, e0)
    e3 = multiply(e2, e0)
    mu = functional(e3) - functional(e2)
    f = e2 + mu * spec.theta

    scale = max(1.0, f.norm()) ** 2
    thr = max(spec.tol * scale, ABS_FLOOR)
    checks = {
        "f^2 = f": (multiply(f, f) - f).norm(),
        "f* = f": (involve(f) - f).norm(),
        "i(f) = E": float(np.max(np.abs(rep.op(f) - e_op))),
    }
    bad = {k: v for k, v in checks.items() if v > thr}
    if bad:
        raise NotIdempotent(f"supporting idempotent failed: {bad}")
    return 0.5 * (f + involve(f))


# --------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True, eq=False)
class Decomposition:
    spec: ItoAlgebraSpec
    method: str  # "general", "vacuum" or "thermal"
    idempotent: Optional[Element]
    newton_coeff: np.ndarray  # (n,), alpha_i
    brownian: np.ndarray  # (n, n), row i = coords of b_i
    levy: np.ndarray  # (n, n), row i = coords of c_i
    brownian_basis: np.ndarray  # columns
    levy_basis: np.ndarray  # columns

    def b(self, i) -> Element:
        return self.spec.element(self.brownian[i])

    def c(self, i) -> Element:
        return self.spec.element(self.levy[i])

    def alpha(self, i) -> complex:
        return complex(self.newton_coeff[i])


def _closure(spec: ItoAlgebraSpec, vectors: np.ndarray) -> np.ndarray:
    """Span of ``vectors`` together with all iterated products."""
    span = orth(vectors)
    for _ in range(spec.dim + 1):
        k = span.shape[1]
        if k == 0:
            return span
        prods = np.einsum("ia,jb,ijk->kab", span, span, spec.structure).reshape(spec.dim, k * k)
        grown = orth(np.hstack([span, prods]))
        if grown.shape[1] == k:
            return span
        span = grown
    return span


def decompose(spec: ItoAlgebraSpec, rep: Optional[FundamentalRep] = None,
              perturbation: Optional[Element] = None) -> Decomposition:
    """Split each basis element as ``alpha_i theta + b_i + c_i``.

    ``c_i = a_i f + f a_i - f a_i f``, ``b_i`` is the remainder with its
    theta-component removed so that ``l(b_i) = 0``.
    """
    rep = build_rep(spec) if rep is None else rep
    f = supporting_idempotent(spec, rep, perturbation=perturbation)
    n = spec.dim
    alpha = np.zeros(n, dtype=complex)
    bs = np.zeros((n, n), dtype=complex)
    cs = np.zeros((n, n), dtype=complex)
    for i, a in enumerate(spec.basis_elements()):
        af = multiply(a, f)
        fa = multiply(f, a)
        c = af + fa - multiply(fa, f)
        b_prime = a - c
        alpha[i] = functional(b_prime)
        bs[i] = (b_prime - alpha[i] * spec.theta).coords
        cs[i] = c.coords
    return Decomposition(
        spec=spec, method="general", idempotent=f, newton_coeff=alpha,
        brownian=bs, levy=cs,
        brownian_basis=orth(bs.T), levy_basis=_closure(spec, cs.T),
    )


def _vacuum_readout(spec):
    vac = spec.meta["vacuum"]
    m = int(vac["m"])
    x_map = np.asarray(vac["x_map"])
    y_map = np.asarray(vac["y_map"])
    ops = np.asarray(vac["ops"])
    readout = np.vstack([spec.functional.reshape(1, -1), x_map, y_map,
                         ops.reshape(spec.dim, m * m).T])
    return m, x_map, y_map, ops, readout


def decompose_vacuum(spec: ItoAlgebraSpec) -> Decomposition:
    """Splitting of a vacuum algebra through the maximal projector P with AP = 0.

    ``b = (0, Px + yP, 0)`` and ``c = (0, (1-P)x + y(1-P), A)``.
    """
    if VACUUM not in spec.families or "vacuum" not in spec.meta:
        raise NotVacuumBuilder("spec carries no vacuum builder metadata")
    m, x_map, y_map, ops, readout = _vacuum_readout(spec)
    n = spec.dim
    if m:
        stacked = np.vstack([np.vstack([a, a.conj().T]) for a in ops] or [np.zeros((0, m))])
        kernel = null_space(stacked)
        proj = kernel @ kernel.conj().T
    else:
        proj = np.zeros((0, 0), dtype=complex)
    alpha = spec.functional.copy()
    bs = np.zeros((n, n), dtype=complex)
    cs = np.zeros((n, n), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(readout))))
    for i in range(n):
        target = np.concatenate([[0.0], proj @ x_map[:, i], proj.T @ y_map[:, i],
                                 np.zeros(m * m)])
        coords, *_ = np.linalg.lstsq(readout, target, rcond=None)
        if np.max(np.abs(readout @ coords - target), initial=0.0) > max(spec.tol * scale, ABS_FLOOR):
            raise NotVacuumBuilder("vacuum read-out is not invertible on this spec")
        bs[i] = coords
        cs[i] = np.eye(n)[i] - alpha[i] * spec.death - coords
    return Decomposition(
        spec=spec, method="vacuum", idempotent=None, newton_coeff=alpha,
        brownian=bs, levy=cs, brownian_basis=orth(bs.T), levy_basis=orth(cs.T),
    )


def decompose_thermal(spec: ItoAlgebraSpec, rep: Optional[FundamentalRep] = None,
                      inner: str = "plus") -> Decomposition:
    """Splitting of a thermal algebra by orthogonal projection onto G.

    ``G = {xi : l(xi) = 0, i(xi) = 0}``; ``b_i`` is the projection of
    ``a_i - l(a_i) theta`` onto G w.r.t. ``<.|.>_+`` (``inner="plus"``) or
    ``<.|.>^-`` (``inner="minus"``).
    """
    if THERMAL not in spec.families:
        raise NotThermalBuilder("spec carries no thermal builder metadata")
    rep = build_rep(spec) if rep is None else rep
    ideals = null_ideals(spec, rep)
    if not is_thermal(spec, ideals):
        raise NotThermalBuilder("null ideals are not C*theta")
    n, r = spec.dim, rep.rank
    d_space = null_space(spec.functional.reshape(1, -1))
    if r:
        ops = np.asarray(rep.gns).reshape(n, r * r).T
        g_space = d_space @ null_space(ops @ d_space) if d_space.shape[1] else d_space
    else:
        g_space = d_space
    metric = np.asarray(spec.gram) if inner == "plus" else np.asarray(spec.gram_minus).conj()
    alpha = spec.functional.copy()
    xi = np.eye(n, dtype=complex) - np.outer(spec.death, alpha)  # column i = a_i - l(a_i) theta
    if g_space.shape[1]:
        small = g_space.conj().T @ metric @ g_space
        eta = g_space @ np.linalg.solve(small, g_space.conj().T @ metric @ xi)
    else:
        eta = np.zeros_like(xi)
    bs = eta.T.copy()
    cs = (xi - eta).T.copy()
    return Decomposition(
        spec=spec, method="thermal", idempotent=None, newton_coeff=alpha,
        brownian=bs, levy=cs, brownian_basis=orth(bs.T), levy_basis=orth(cs.T),
    )


def compare_decompositions(d1: Decomposition, d2: Decomposition) -> dict:
    """Largest principal angles between the component subspaces.

    Levy parts are compared modulo C*theta since the general route puts a
    theta-component into ``c`` that the direct routes put into ``alpha``.
    """
    theta = d1.spec.death.reshape(-1, 1)
    return {
        "brownian_angle": max_angle(d1.brownian_basis, d2.brownian_basis),
        "levy_angle": max_angle(join(d1.levy_basis, theta), join(d2.levy_basis, theta)),
    }


def decompositions_agree(d1: Decomposition, d2: Decomposition, tol=ANGLE_TOL) -> bool:
    return all(v < tol for v in compare_decompositions(d1, d2).values())


def decomposition_residuals(dec: Decomposition) -> dict:
    """Residuals of the splitting identities, all expected to vanish.

    Product residuals are relative: divided by the largest structure
    constant and, where ``f`` enters, by ``max(1, |f|)`` per factor of ``f``.
    Component bases are orthonormal, so they carry no extra scale.
    """
    spec = dec.spec
    n = spec.dim
    theta = spec.death
    recon = np.eye(n) - (np.outer(dec.newton_coeff, theta) + dec.brownian + dec.levy)
    c = spec.structure
    c_scale = max(1.0, float(np.max(np.abs(c))))

    def prod(u, v):
        return np.einsum("ia,jb,ijk->abk", u, v, c)

    bb, kc = dec.brownian_basis, dec.levy_basis
    orth_bc = max(np.max(np.abs(prod(bb, kc)), initial=0.0), np.max(np.abs(prod(kc, bb)), initial=0.0))
    bprod = prod(bb, bb).reshape(-1, n)
    tn = theta / np.vdot(theta, theta)
    off_theta = bprod - np.outer(bprod @ tn.conj(), theta)
    out = {
        "reconstruction": float(np.max(np.abs(recon))),
        "orthogonality": float(orth_bc) / c_scale,
        "brownian_nilpotency": float(np.max(np.abs(off_theta), initial=0.0)) / c_scale,
    }
    f = dec.idempotent
    if f is not None:
        f_scale = max(1.0, f.norm())
        out["idempotent"] = (multiply(f, f) - f).norm() / (c_scale * f_scale ** 2)
        out["idempotent_star"] = (involve(f) - f).norm() / f_scale
        bf = [max(multiply(spec.element(v), f).norm(), multiply(f, spec.element(v)).norm())
              for v in bb.T]
        out["brownian_kills_f"] = float(max(bf, default=0.0)) / (c_scale * f_scale)
    return out


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassificationReport:
    is_newton: bool
    is_wiener: bool
    is_poisson: bool
    is_mixed: bool
    is_vacuum: bool
    is_thermal: bool
    is_commutative: bool
    brownian_dim: int
    levy_dim: int

    @property
    def kind(self) -> str:
        for name in ("newton", "wiener", "poisson", "mixed"):
            if getattr(self, f"is_{name}"):
                return name
        return "mixed"


def is_commutative(spec: ItoAlgebraSpec) -> bool:
    c = spec.structure
    resid = float(np.max(np.abs(c - np.transpose(c, (1, 0, 2)))))
    return resid <= max(spec.tol * max(1.0, float(np.max(np.abs(c)))), ABS_FLOOR)


def classify(spec: ItoAlgebraSpec, dec: Optional[Decomposition] = None,
             rep: Optional[FundamentalRep] = None) -> ClassificationReport:
    rep = build_rep(spec) if rep is None else rep
    dec = decompose(spec, rep) if dec is None else dec
    ideals = null_ideals(spec, rep)
    kb = dec.brownian_basis.shape[1]
    kc = dec.levy_basis.shape[1]
    newton_like = spec.dim == 1 or (kb == 0 and kc == 0)
    return ClassificationReport(
        is_newton=newton_like,
        is_wiener=not newton_like and kc == 0,
        is_poisson=not newton_like and kb == 0,
        is_mixed=kb > 0 and kc > 0,
        is_vacuum=is_vacuum(spec, ideals),
        is_thermal=is_thermal(spec, ideals),
        is_commutative=is_commutative(spec),
        brownian_dim=kb,
        levy_dim=kc,
    )
