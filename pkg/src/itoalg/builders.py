"""Constructors for the standard Ito algebras.

Every builder places the death ``theta`` at basis index 0 with ``l = e_0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .algebra import ItoAlgebraSpec, change_basis, default_tol
from .errors import NotAnAlgebra, ShapeError, StateNotFaithful
from .linalg import orth

VACUUM = "vacuum"
THERMAL = "thermal"


def _e0(n):
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return v


def newton(tol=None) -> ItoAlgebraSpec:
    """The one-dimensional algebra C*theta of ordinary calculus, (dt)^2 = 0."""
    return ItoAlgebraSpec(
        dim=1,
        labels=("theta",),
        structure=np.zeros((1, 1, 1)),
        involution=np.eye(1),
        death=_e0(1),
        functional=_e0(1),
        tol=default_tol() if tol is None else tol,
        meta={
            "families": frozenset({VACUUM, THERMAL}),
            "vacuum": {"m": 0, "x_map": np.zeros((0, 1)), "y_map": np.zeros((0, 1)),
                       "ops": np.zeros((1, 0, 0))},
        },
    )


def wiener(d: int, tol=None) -> ItoAlgebraSpec:
    """Ito algebra of ``d`` standard Wiener processes: dw_i dw_j = delta_ij dt."""
    if d < 1:
        raise ShapeError("wiener needs d >= 1")
    n = d + 1
    c = np.zeros((n, n, n), dtype=complex)
    for i in range(1, n):
        c[i, i, 0] = 1.0
    return ItoAlgebraSpec(
        dim=n,
        labels=("theta",) + tuple(f"w{i}" for i in range(1, n)),
        structure=c,
        involution=np.eye(n),
        death=_e0(n),
        functional=_e0(n),
        tol=default_tol() if tol is None else tol,
        meta={"families": frozenset({THERMAL})},
    )


def poisson(d: int, tol=None) -> ItoAlgebraSpec:
    """Ito algebra of ``d`` compensated unit-rate Poisson processes.

    ``p_i`` is the compensated generator ``dn_i - dt``, so
    ``p_i p_j = delta_ij (theta + p_i)``.
    """
    if d < 1:
        raise ShapeError("poisson needs d >= 1")
    n = d + 1
    c = np.zeros((n, n, n), dtype=complex)
    for i in range(1, n):
        c[i, i, 0] = 1.0
        c[i, i, i] = 1.0
    return ItoAlgebraSpec(
        dim=n,
        labels=("theta",) + tuple(f"p{i}" for i in range(1, n)),
        structure=c,
        involution=np.eye(n),
        death=_e0(n),
        functional=_e0(n),
        tol=default_tol() if tol is None else tol,
        meta={"families": frozenset({THERMAL})},
    )


# --------------------------------------------------------------------------
# vacuum noise


@dataclass(frozen=True)
class VacuumInput:
    m: int
    algebra: tuple  # m x m matrices spanning a dagger-closed subalgebra of B(h)

    @classmethod
    def named(cls, m: int, kind: str) -> "VacuumInput":
        """``kind`` is one of ``full``, ``zero``, ``diagonal``, ``scalar``."""
        units = [[np.outer(np.eye(m)[i], np.eye(m)[j]) for j in range(m)] for i in range(m)]
        if kind == "full":
            mats = [units[i][j] for i in range(m) for j in range(m)]
        elif kind == "zero":
            mats = []
        elif kind == "diagonal":
            mats = [units[i][i] for i in range(m)]
        elif kind == "scalar":
            mats = [np.eye(m)]
        else:
            raise ShapeError(f"unknown vacuum algebra {kind!r}")
        return cls(m, tuple(mats))


def _algebra_basis(m, mats, tol):
    """Independent basis of span(mats) plus its product and adjoint tables."""
    mats = [np.asarray(a, dtype=complex) for a in mats]
    for a in mats:
        if a.shape != (m, m):
            raise ShapeError(f"algebra matrices must be {m}x{m}, got {a.shape}")
    if not mats:
        return [], np.zeros((0, 0, 0), dtype=complex), np.zeros((0, 0), dtype=complex)
    flat = np.array([a.reshape(-1) for a in mats]).T  # (m*m, q)
    if np.linalg.matrix_rank(flat, tol=1e-10 * max(1.0, np.abs(flat).max())) < flat.shape[1]:
        flat = orth(flat)
        mats = [flat[:, j].reshape(m, m) for j in range(flat.shape[1])]
    q = flat.shape[1]
    if q == 0:
        return [], np.zeros((0, 0, 0), dtype=complex), np.zeros((0, 0), dtype=complex)
    pinv = np.linalg.pinv(flat)
    scale = max(1.0, float(np.abs(flat).max()) ** 2)

    def project(target, what):
        coef = pinv @ target.reshape(-1)
        resid = np.abs(flat @ coef - target.reshape(-1)).max()
        if resid > max(tol * scale, 1e-12):
            raise NotAnAlgebra(f"span of the operator algebra is not closed under {what} "
                               f"(residual {resid:.3g})")
        return coef

    prod = np.zeros((q, q, q), dtype=complex)
    dag = np.zeros((q, q), dtype=complex)
    for i in range(q):
        dag[i] = project(mats[i].conj().T, "adjoints")
        for j in range(q):
            prod[i, j] = project(mats[i] @ mats[j], "products")
    return mats, prod, dag


def vacuum(inp: VacuumInput, tol=None) -> ItoAlgebraSpec:
    """Vacuum noise algebra C + (h + h*) + A, multiplied as HP quadruples.

    Basis: ``theta``, kets ``x_i``, bras ``y_i`` (i = 1..m), then a basis of
    the operator algebra. A triple ``(alpha, x + y, A)`` multiplies as the
    triangular matrix ``[[0, y, alpha], [0, A, x], [0, 0, 0]]``, which gives
    ``a*a = (|x|^2, x*A + A'x, A'A)`` and ``aa* = (|y|^2, Ay* + yA', AA')``.
    """
    tol = default_tol() if tol is None else tol
    m = int(inp.m)
    if m < 1:
        raise ShapeError("vacuum needs m >= 1")
    mats, aprod, adag = _algebra_basis(m, inp.algebra, tol)
    q = len(mats)
    n = 1 + 2 * m + q
    ket = lambda i: 1 + i  # noqa: E731
    bra = lambda i: 1 + m + i  # noqa: E731
    op = lambda j: 1 + 2 * m + j  # noqa: E731

    c = np.zeros((n, n, n), dtype=complex)
    for i in range(m):
        c[bra(i), ket(i), 0] = 1.0
    for j, a in enumerate(mats):
        for i in range(m):
            for k in range(m):
                c[op(j), ket(i), ket(k)] = a[k, i]  # A x_i = sum_k A[k, i] x_k
                c[bra(i), op(j), bra(k)] = a[i, k]  # y_i A = sum_k A[i, k] y_k
        for jj in range(q):
            c[op(j), op(jj), 1 + 2 * m:] = aprod[j, jj]

    s = np.zeros((n, n), dtype=complex)
    s[0, 0] = 1.0
    for i in range(m):
        s[ket(i), bra(i)] = 1.0
        s[bra(i), ket(i)] = 1.0
    for j in range(q):
        s[op(j), 1 + 2 * m:] = adag[j]

    x_map = np.zeros((m, n), dtype=complex)
    y_map = np.zeros((m, n), dtype=complex)
    ops = np.zeros((n, m, m), dtype=complex)
    for i in range(m):
        x_map[i, ket(i)] = 1.0
        y_map[i, bra(i)] = 1.0
    for j, a in enumerate(mats):
        ops[op(j)] = a

    labels = (("theta",) + tuple(f"x{i + 1}" for i in range(m))
              + tuple(f"y{i + 1}" for i in range(m)) + tuple(f"A{j + 1}" for j in range(q)))
    return ItoAlgebraSpec(
        dim=n, labels=labels, structure=c, involution=s, death=_e0(n), functional=_e0(n),
        tol=tol,
        meta={"families": frozenset({VACUUM}),
              "vacuum": {"m": m, "x_map": x_map, "y_map": y_map, "ops": ops}},
    )


# --------------------------------------------------------------------------
# thermal noise


@dataclass(frozen=True)
class ThermalInput:
    k: int
    rho: np.ndarray


def thermal(inp: ThermalInput, tol=None) -> ItoAlgebraSpec:
    """Thermal noise algebra C + M_k built from a faithful density matrix.

    With <x|y>_+ = tr(rho x'y) the product of matrix units is
    ``E_ij E_kl = delta_jk (E_il + tr(rho E_il) theta)``, so that
    ``a*a = (<xi|xi>_+, xi'xi)`` and ``aa* = (tr(rho xi xi'), xi xi')``.
    """
    tol = default_tol() if tol is None else tol
    k = int(inp.k)
    rho = np.asarray(inp.rho, dtype=complex)
    if k < 1 or rho.shape != (k, k):
        raise ShapeError(f"rho must be {k}x{k}")
    if np.abs(rho - rho.conj().T).max() > max(tol, 1e-12):
        raise ShapeError("rho must be Hermitian")
    if abs(np.trace(rho) - 1.0) > max(tol, 1e-12):
        raise ShapeError(f"rho must have unit trace, got {np.trace(rho).real:.6g}")
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo <= tol:
        raise StateNotFaithful(f"rho has eigenvalue {lo:.3g} <= tol")

    n = 1 + k * k
    unit = lambda i, j: 1 + i * k + j  # noqa: E731
    c = np.zeros((n, n, n), dtype=complex)
    s = np.zeros((n, n), dtype=complex)
    s[0, 0] = 1.0
    for i in range(k):
        for j in range(k):
            s[unit(i, j), unit(j, i)] = 1.0
            for l in range(k):
                c[unit(i, j), unit(j, l), unit(i, l)] = 1.0
                c[unit(i, j), unit(j, l), 0] = rho[l, i]
    labels = ("theta",) + tuple(f"E{i + 1}{j + 1}" if k < 10 else f"E{i + 1}_{j + 1}"
                                for i in range(k) for j in range(k))
    return ItoAlgebraSpec(
        dim=n, labels=labels, structure=c, involution=s, death=_e0(n), functional=_e0(n),
        tol=tol, meta={"families": frozenset({THERMAL})},
    )


# --------------------------------------------------------------------------
# sums and random fixtures


def theta_first(spec: ItoAlgebraSpec) -> ItoAlgebraSpec:
    """Same algebra, re-based so that theta is basis vector 0."""
    theta = spec.death
    if theta[0] == 1 and not np.any(theta[1:]):
        return spec
    lead = int(np.argmax(np.abs(theta)))
    others = [j for j in range(spec.dim) if j != lead]
    t = np.zeros((spec.dim, spec.dim), dtype=complex)
    t[:, 0] = theta
    for col, j in enumerate(others, start=1):
        t[j, col] = 1.0
    labels = ("theta" if "theta" not in [spec.labels[j] for j in others] else "theta0",)
    labels += tuple(spec.labels[j] for j in others)
    return change_basis(spec, t, labels=labels)


def _merge_vacuum(v1, v2, idx1, idx2, n):
    m1, m2 = int(v1["m"]), int(v2["m"])
    m = m1 + m2
    x_map = np.zeros((m, n), dtype=complex)
    y_map = np.zeros((m, n), dtype=complex)
    ops = np.zeros((n, m, m), dtype=complex)
    for src, dst in enumerate(idx1):
        x_map[:m1, dst] += np.asarray(v1["x_map"])[:, src]
        y_map[:m1, dst] += np.asarray(v1["y_map"])[:, src]
        ops[dst, :m1, :m1] += np.asarray(v1["ops"])[src]
    for src, dst in enumerate(idx2):
        x_map[m1:, dst] += np.asarray(v2["x_map"])[:, src]
        y_map[m1:, dst] += np.asarray(v2["y_map"])[:, src]
        ops[dst, m1:, m1:] += np.asarray(v2["ops"])[src]
    return {"m": m, "x_map": x_map, "y_map": y_map, "ops": ops}


def orthogonal_sum(s1: ItoAlgebraSpec, s2: ItoAlgebraSpec, tol=None) -> ItoAlgebraSpec:
    """Glue two algebras along their death; cross products vanish."""
    s1, s2 = theta_first(s1), theta_first(s2)
    n1, n2 = s1.dim, s2.dim
    n = n1 + n2 - 1
    idx1 = list(range(n1))
    idx2 = [0] + list(range(n1, n))
    c = np.zeros((n, n, n), dtype=complex)
    s = np.zeros((n, n), dtype=complex)
    ell = np.zeros(n, dtype=complex)
    for spec, idx in ((s1, idx1), (s2, idx2)):
        ix = np.array(idx)
        c[np.ix_(ix[1:], ix[1:], ix)] = spec.structure[1:, 1:, :]
        s[np.ix_(ix[1:], ix)] = spec.involution[1:, :]
        ell[ix[1:]] = spec.functional[1:]
    s[0, 0] = 1.0
    ell[0] = 1.0

    labels = list(s1.labels)
    for lab in s2.labels[1:]:
        new, suffix = lab, 2
        while new in labels:
            new, suffix = f"{lab}_{suffix}", suffix + 1
        labels.append(new)

    families = s1.families & s2.families
    meta = {"families": families}
    if VACUUM in families and "vacuum" in s1.meta and "vacuum" in s2.meta:
        meta["vacuum"] = _merge_vacuum(s1.meta["vacuum"], s2.meta["vacuum"], idx1, idx2, n)
    return ItoAlgebraSpec(
        dim=n, labels=tuple(labels), structure=c, involution=s, death=_e0(n),
        functional=ell, tol=min(s1.tol, s2.tol) if tol is None else tol, meta=meta,
    )


def random_vacuum_input(rng, m: int) -> VacuumInput:
    """Block algebra in a random orthonormal frame of C^m.

    Each block of the frame is either annihilated (zero), carries only its
    projection (scalar), or carries all matrix units (full); the span of such
    blocks is dagger-closed by construction.
    """
    u = unitary_group.rvs(m, random_state=rng) if m > 1 else np.eye(1, dtype=complex)
    mats = []
    start = 0
    while start < m:
        size = int(rng.integers(1, m - start + 1))
        cols = u[:, start:start + size]
        kind = rng.choice(["zero", "scalar", "full"])
        if kind == "scalar":
            mats.append(cols @ cols.conj().T)
        elif kind == "full":
            mats.extend(np.outer(cols[:, i], cols[:, j].conj())
                        for i in range(size) for j in range(size))
        start += size
    return VacuumInput(m, tuple(mats))


def random_thermal_input(rng, k: int) -> ThermalInput:
    w = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    rho = w @ w.conj().T + 0.2 * np.eye(k)
    rho = (rho + rho.conj().T) / 2
    return ThermalInput(k, rho / np.trace(rho).real)


def random_algebra(seed: int, kind: str = "mixed", m: int = 2, k: int = 2, d: int = 1,
                   tol=None) -> ItoAlgebraSpec:
    """Deterministic random fixture.

    ``vacuum`` and ``thermal`` return builder algebras with random data;
    ``mixed`` sums a random vacuum, a random thermal and a Wiener part and then
    mixes the non-theta coordinates by a random invertible change of basis.
    """
    if min(m, k, d) < 1:
        raise ShapeError("sizes must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "vacuum":
        return vacuum(random_vacuum_input(rng, m), tol=tol)
    if kind == "thermal":
        return thermal(random_thermal_input(rng, k), tol=tol)
    if kind != "mixed":
        raise ShapeError(f"unknown random kind {kind!r}")
    spec = orthogonal_sum(vacuum(random_vacuum_input(rng, m), tol=tol),
                          thermal(random_thermal_input(rng, k), tol=tol))
    spec = orthogonal_sum(spec, wiener(d, tol=tol))
    n = spec.dim
    t = np.eye(n, dtype=complex)
    t[1:, 1:] += 0.3 * (rng.normal(size=(n - 1, n - 1)) + 1j * rng.normal(size=(n - 1, n - 1)))
    t[0, 1:] = 0.5 * rng.normal(size=n - 1)
    return change_basis(spec, t, labels=("theta",) + tuple(f"r{i}" for i in range(1, n)))
