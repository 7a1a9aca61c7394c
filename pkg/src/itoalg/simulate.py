"""Classical noise realized by a commutative Ito algebra.

A commutative algebra is a Newton-Wiener-Poisson mixture:

    Lambda(t, a) = l(a) t + sum_j eta_j(a) w_j(t) + sum_k zeta_k(a) (n_k(t) - nu_k t)

with standard Wiener processes ``w_j`` and Poisson processes ``n_k`` of
rate ``nu_k``. The loadings satisfy the multiplication table
``eta(ab) = 0``, ``zeta_k(ab) = zeta_k(a) zeta_k(b)`` and
``l(ab) = eta(a).eta(b) + sum_k nu_k zeta_k(a) zeta_k(b)``.
Poisson jumps are placed event-driven (exponential clocks), so the jump part
of the quadratic covariation is a plain sum over jumps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import ABS_FLOOR, Element, ItoAlgebraSpec
from .errors import DiagonalizationFailed, MismatchedBundle, NotCommutative
from .representation import FundamentalRep, build_rep
from .structure import Decomposition, is_commutative, unit_projector


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    spec: ItoAlgebraSpec
    drift: np.ndarray  # (n,), l(a_i)
    wiener: np.ndarray  # (n_w, n), eta_j(a_i)
    poisson: np.ndarray  # (n_p, n), zeta_k(a_i)
    rates: np.ndarray  # (n_p,), nu_k
    reconstruction_residual: float

    @property
    def n_wiener(self) -> int:
        return self.wiener.shape[0]

    @property
    def n_poisson(self) -> int:
        return self.poisson.shape[0]

    def loadings(self, a) -> tuple:
        """``(l(a), eta(a), zeta(a))`` for an Element or coordinate vector."""
        coords = _coords(self.spec, a)
        return complex(self.drift @ coords), self.wiener @ coords, self.poisson @ coords

    def structure_tensor(self) -> np.ndarray:
        """Products rebuilt from the loadings alone, as a structure tensor."""
        n = self.spec.dim
        readout = np.vstack([self.drift.reshape(1, -1), self.wiener, self.poisson])
        eta, zeta = self.wiener, self.poisson
        lab = np.einsum("ji,jk->ik", eta, eta) + np.einsum("p,pi,pk->ik", self.rates, zeta, zeta)
        target = np.concatenate([
            lab.reshape(1, n, n),
            np.zeros((self.n_wiener, n, n)),
            np.einsum("pi,pk->pik", zeta, zeta),
        ]).reshape(readout.shape[0], n * n)
        sol, *_ = np.linalg.lstsq(readout, target, rcond=None)
        return sol.reshape(n, n, n).transpose(1, 2, 0)


def _coords(spec, a):
    if isinstance(a, Element):
        if a.spec_id != spec.spec_id:
            raise MismatchedBundle("element belongs to a different algebra")
        return a.coords
    if isinstance(a, (int, np.integer)):
        return np.eye(spec.dim)[a]
    return np.asarray(a, dtype=complex)


def _real_orthonormal(vectors, cutoff):
    """Orthonormal basis of the real span of vectors whose inner products are real."""
    if vectors.shape[1] == 0:
        return vectors
    gram = np.real(vectors.conj().T @ vectors)
    lam, coef = np.linalg.eigh((gram + gram.T) / 2)
    keep = lam > cutoff * max(1.0, float(lam.max()))
    return vectors @ (coef[:, keep] / np.sqrt(lam[keep]))


def canonical_form(spec: ItoAlgebraSpec, decomposition: Optional[Decomposition] = None,
                   rep: Optional[FundamentalRep] = None, seed: int = 0) -> CanonicalForm:
    """Wiener loadings and Poisson directions of a commutative algebra.

    The Kolmogorov space splits into the range of the unit ``E`` of the
    operator algebra (Levy sector) and its complement (Brownian sector).
    Brownian loadings are ``eta_j(a) = u_j^H k(a)`` for an orthonormal basis
    ``u_j`` built from kets of self-adjoint Brownian elements, so ``eta`` is
    real on self-adjoint elements. On the Levy sector the GNS matrices are
    commuting normal matrices; their joint eigenvectors ``v_k`` give
    characters ``zeta_k(a) = v_k^H i(a) v_k`` and ket components
    ``v_k^H k(a) = gamma_k zeta_k(a)``, whence the rate ``nu_k = |gamma_k|^2``.
    ``decomposition`` supplies the Brownian basis when given.
    """
    if not is_commutative(spec):
        raise NotCommutative("simulation needs a commutative algebra")
    rep = build_rep(spec) if rep is None else rep
    n, r = spec.dim, rep.rank
    kmat = np.asarray(rep.kolmogorov)
    tol = max(spec.tol, ABS_FLOOR)

    if r:
        e_op = unit_projector(rep)
        lam_e, vec_e = np.linalg.eigh(e_op)
        levy_space = vec_e[:, lam_e > 0.5]
    else:
        levy_space = np.zeros((0, 0), dtype=complex)

    # Brownian sector
    if decomposition is not None:
        bvecs = decomposition.brownian_basis
    else:
        bvecs = np.eye(n, dtype=complex)
    kb = kmat @ bvecs if r else np.zeros((0, bvecs.shape[1]))
    kb_star = kmat @ (spec.involution.T @ bvecs.conj()) if r else kb
    if levy_space.size:
        kb = kb - levy_space @ (levy_space.conj().T @ kb)
        kb_star = kb_star - levy_space @ (levy_space.conj().T @ kb_star)
    selfadj = np.hstack([kb + kb_star, 1j * (kb - kb_star)])
    u = _real_orthonormal(selfadj, 1e-10) if r else np.zeros((0, 0))
    wiener = (u.conj().T @ kmat) if u.size else np.zeros((0, n), dtype=complex)

    # Poisson sector
    s = levy_space.shape[1] if levy_space.size else 0
    if s:
        ops = np.asarray(rep.gns)
        local = np.einsum("ai,jab,bk->jik", levy_space.conj(), ops, levy_space)
        off = np.max(np.abs(local - np.einsum("jii->ji", local)[:, :, None] * np.eye(s)))
        if off <= tol * max(1.0, float(np.max(np.abs(local)))):
            vs = np.eye(s, dtype=complex)
        else:
            rng = np.random.default_rng(seed)
            herm = np.concatenate([(local + local.conj().transpose(0, 2, 1)) / 2,
                                   (local - local.conj().transpose(0, 2, 1)) / 2j])
            combo = np.tensordot(rng.standard_normal(herm.shape[0]), herm, axes=1)
            _, vs = np.linalg.eigh(combo)
        diag = np.einsum("ak,jab,bk->jk", vs.conj(), local, vs)
        resid = np.max(np.abs(np.einsum("ak,jab,bl->jkl", vs.conj(), local, vs)
                              - diag[:, :, None] * np.eye(s)))
        if resid > tol * max(1.0, float(np.max(np.abs(local)))):
            raise DiagonalizationFailed(f"joint diagonalization residual {resid:.3g}")
        poisson = diag.T.copy()  # (s, n): zeta_k(a_j)
        kets = (levy_space @ vs).conj().T @ kmat  # (s, n): v_k^H k(a_j)
        best = np.argmax(np.abs(poisson), axis=1)
        gamma = kets[np.arange(s), best] / poisson[np.arange(s), best]
        rates = np.abs(gamma) ** 2
    else:
        poisson = np.zeros((0, n), dtype=complex)
        rates = np.zeros(0)

    form = CanonicalForm(spec=spec, drift=spec.functional.copy(), wiener=wiener,
                         poisson=poisson, rates=rates, reconstruction_residual=0.0)
    resid = float(np.max(np.abs(form.structure_tensor() - spec.structure)))
    if resid > max(tol * max(1.0, float(np.max(np.abs(spec.structure)))), ABS_FLOOR):
        raise DiagonalizationFailed(f"canonical form does not reproduce the products ({resid:.3g})")
    return CanonicalForm(spec=spec, drift=form.drift, wiener=wiener, poisson=poisson,
                         rates=rates, reconstruction_residual=resid)


@dataclass(frozen=True, eq=False)
class PathBundle:
    """One sample path: Wiener increments on a grid and Poisson jump times."""

    form: CanonicalForm
    horizon: float
    mesh: float
    wiener_increments: np.ndarray  # (steps, n_w)
    jump_times: tuple  # one sorted array per Poisson direction
    seed: int
    path_index: int

    @property
    def steps(self) -> int:
        return self.wiener_increments.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.mesh

    def jump_counts(self, times=None) -> np.ndarray:
        """``N_k(t)`` for each direction, at ``times`` (default: horizon)."""
        if times is None:
            return np.array([len(j) for j in self.jump_times], dtype=float)
        times = np.asarray(times)
        return np.array([np.searchsorted(j, times, side="right") for j in self.jump_times],
                        dtype=float).reshape(len(self.jump_times), *times.shape)

    def values(self, a) -> np.ndarray:
        """``Lambda(t, a)`` on the grid."""
        drift, eta, zeta = self.form.loadings(a)
        t = self.grid
        w = np.concatenate([np.zeros((1, self.form.n_wiener)),
                            np.cumsum(self.wiener_increments, axis=0)])
        out = drift * t + w @ eta
        if self.form.n_poisson:
            comp = self.jump_counts(t) - self.form.rates[:, None] * t[None, :]
            out = out + zeta @ comp
        return out

    def terminal(self, a) -> complex:
        """``Lambda(T, a)`` with the exact jump count at the horizon."""
        drift, eta, zeta = self.form.loadings(a)
        t = self.horizon
        val = drift * t + self.wiener_increments.sum(axis=0) @ eta
        if self.form.n_poisson:
            val = val + zeta @ (self.jump_counts() - self.form.rates * t)
        return complex(val)

    def covariation(self, a, b) -> complex:
        """Realized quadratic covariation ``[Lambda(a), Lambda(b)]_T``.

        Continuous part summed over the grid, jump part summed over jumps.
        Drift and compensator have finite variation and contribute nothing
        in the mesh limit, so they are left out.
        """
        _, eta_a, zeta_a = self.form.loadings(a)
        _, eta_b, zeta_b = self.form.loadings(b)
        dw = self.wiener_increments
        cont = np.sum((dw @ eta_a) * (dw @ eta_b))
        jumps = np.sum(zeta_a * zeta_b * self.jump_counts()) if self.form.n_poisson else 0.0
        return complex(cont + jumps)


def _one_path(form, horizon, mesh, steps, seed, idx):
    rng = np.random.default_rng([seed, idx])
    dw = rng.standard_normal((steps, form.n_wiener)) * np.sqrt(mesh)
    jumps = []
    for rate in form.rates:
        times = []
        t = rng.exponential(1.0 / rate) if rate > 0 else np.inf
        while t <= horizon:
            times.append(t)
            t += rng.exponential(1.0 / rate)
        jumps.append(np.array(times))
    return PathBundle(form=form, horizon=horizon, mesh=mesh, wiener_increments=dw,
                      jump_times=tuple(jumps), seed=seed, path_index=idx)


def sample_paths(form: CanonicalForm, horizon: float, mesh: float, n_paths: int,
                 seed: int) -> list:
    """``n_paths`` independent paths; path ``i`` depends only on ``(seed, i)``."""
    if horizon <= 0 or mesh <= 0 or n_paths < 1:
        raise ValueError("need horizon > 0, mesh > 0 and n_paths >= 1")
    steps = int(round(horizon / mesh))
    if steps < 1 or abs(steps * mesh - horizon) > 1e-9 * horizon:
        raise ValueError("horizon must be a whole number of mesh steps")
    return [_one_path(form, horizon, mesh, steps, seed, i) for i in range(n_paths)]


def coarsen(bundle: PathBundle, factor: int) -> PathBundle:
    """Same path on a grid ``factor`` times coarser."""
    if bundle.steps % factor:
        raise ValueError(f"{bundle.steps} steps do not split into blocks of {factor}")
    dw = bundle.wiener_increments.reshape(bundle.steps // factor, factor, -1).sum(axis=1)
    return PathBundle(form=bundle.form, horizon=bundle.horizon, mesh=bundle.mesh * factor,
                      wiener_increments=dw, jump_times=bundle.jump_times,
                      seed=bundle.seed, path_index=bundle.path_index)


@dataclass(frozen=True)
class ItoTableCheck:
    pair: tuple
    realized: np.ndarray  # (paths,), realized covariation
    predicted: np.ndarray  # (paths,), Lambda(T, ab) on the same path
    expected_mean: complex  # l(ab) T
    mean: complex
    stderr: float

    @property
    def errors(self) -> np.ndarray:
        return self.realized - self.predicted

    @property
    def rms_error(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.errors) ** 2)))

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.errors)))


def _check_bundles(spec, bundles):
    if not bundles:
        raise MismatchedBundle("no paths given")
    for b in bundles:
        if b.form.spec.spec_id != spec.spec_id:
            raise MismatchedBundle("paths were generated from a different algebra")


def ito_table_check(spec: ItoAlgebraSpec, bundles: Sequence[PathBundle], pair) -> ItoTableCheck:
    """Compare ``[Lambda(a), Lambda(b)]_T`` with ``Lambda(T, ab)`` path by path."""
    _check_bundles(spec, bundles)
    a, b = (_coords(spec, x) for x in pair)
    ab = np.einsum("i,j,ijk->k", a, b, spec.structure)
    realized = np.array([p.covariation(a, b) for p in bundles])
    predicted = np.array([p.terminal(ab) for p in bundles])
    horizon = bundles[0].horizon
    m = len(bundles)
    stderr = float(np.std(realized, ddof=1) / np.sqrt(m)) if m > 1 else float("inf")
    return ItoTableCheck(pair=tuple(pair) if all(isinstance(x, (int, np.integer)) for x in pair)
                         else (), realized=realized, predicted=predicted,
                         expected_mean=complex(spec.functional @ ab * horizon),
                         mean=complex(np.mean(realized)), stderr=stderr)


@dataclass(frozen=True)
class MeanCheck:
    mean: complex
    stderr: float
    expected: complex

    def within(self, k=3.0) -> bool:
        return abs(self.mean - self.expected) <= k * self.stderr + 1e-12


def mean_increment(spec: ItoAlgebraSpec, bundles: Sequence[PathBundle], a) -> MeanCheck:
    """Cross-path mean of ``Lambda(T, a)`` against ``l(a) T``."""
    _check_bundles(spec, bundles)
    coords = _coords(spec, a)
    vals = np.array([p.terminal(coords) for p in bundles])
    m = len(vals)
    stderr = float(np.std(vals, ddof=1) / np.sqrt(m)) if m > 1 else float("inf")
    return MeanCheck(mean=complex(vals.mean()), stderr=stderr,
                     expected=complex(spec.functional @ coords * bundles[0].horizon))
