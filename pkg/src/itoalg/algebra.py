"""Finite-dimensional Ito *-algebras described by structure constants.

An algebra of dimension ``n`` is fixed by

* ``structure[i, j, k]``: ``a_i a_j = sum_k structure[i, j, k] a_k``;
* ``involution[i, j]``: ``a_i* = sum_j involution[i, j] a_j``, extended
  conjugate-linearly;
* ``death``: coordinates of the self-adjoint annihilator (the ``dt`` element);
* ``functional[i] = l(a_i)``, the mean-value functional.

Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import ShapeError, SpecMismatch

DEFAULT_TOL = 1e-9
ABS_FLOOR = 1e-12


def default_tol() -> float:
    """Default algebraic tolerance, overridable through ``ITOALG_TOL``."""
    value = os.environ.get("ITOALG_TOL")
    return float(value) if value else DEFAULT_TOL


def _frozen(array, shape, name, dtype=complex):
    try:
        arr = np.array(array, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"{name}: cannot convert to a {dtype.__name__} array ({exc})")
    if arr.shape != shape:
        raise ShapeError(f"{name}: expected shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ItoAlgebraSpec:
    dim: int
    labels: tuple
    structure: np.ndarray
    involution: np.ndarray
    death: np.ndarray
    functional: np.ndarray
    tol: float = DEFAULT_TOL
    # builder metadata: "families" (frozenset of "vacuum"/"thermal") and, for
    # vacuum algebras, the linear read-out maps onto (ket, bra, operator)
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ShapeError(f"dim must be a positive integer, got {self.dim!r}")
        n = int(self.dim)
        object.__setattr__(self, "dim", n)
        labels = tuple(str(s) for s in self.labels)
        if len(labels) != n:
            raise ShapeError(f"labels: expected {n} names, got {len(labels)}")
        if len(set(labels)) != n:
            raise ShapeError("labels must be distinct")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "structure", _frozen(self.structure, (n, n, n), "structure"))
        object.__setattr__(self, "involution", _frozen(self.involution, (n, n), "involution"))
        object.__setattr__(self, "death", _frozen(self.death, (n,), "death"))
        object.__setattr__(self, "functional", _frozen(self.functional, (n,), "functional"))
        tol = float(self.tol)
        if not tol >= 0:
            raise ShapeError(f"tol must be non-negative, got {self.tol!r}")
        object.__setattr__(self, "tol", tol)

    @cached_property
    def spec_id(self) -> str:
        """Content fingerprint; elements combine only when these agree."""
        h = hashlib.sha1()
        for arr in (self.structure, self.involution, self.death, self.functional):
            # + 0.0 folds -0.0 into 0.0
            h.update(np.ascontiguousarray(arr + 0.0).tobytes())
        return h.hexdigest()[:16]

    @property
    def families(self) -> frozenset:
        return frozenset(self.meta.get("families", ()))

    def with_tol(self, tol: float) -> "ItoAlgebraSpec":
        return replace(self, tol=tol)

    def element(self, coords) -> "Element":
        return Element(self, coords)

    def basis(self, i) -> "Element":
        if isinstance(i, str):
            i = self.labels.index(i)
        coords = np.zeros(self.dim, dtype=complex)
        coords[i] = 1.0
        return Element(self, coords)

    def basis_elements(self) -> list:
        return [self.basis(i) for i in range(self.dim)]

    @property
    def theta(self) -> "Element":
        return Element(self, self.death)

    def zero(self) -> "Element":
        return Element(self, np.zeros(self.dim, dtype=complex))

    @cached_property
    def left_mult(self) -> np.ndarray:
        """``L[i]`` is the matrix of ``b -> a_i b`` on coordinates."""
        out = np.transpose(self.structure, (0, 2, 1)).copy()
        out.setflags(write=False)
        return out

    @cached_property
    def gram(self) -> np.ndarray:
        """``G[i, j] = l(a_i* a_j)``."""
        products = self.structure @ self.functional  # l(a_p a_j)
        out = self.involution @ products
        out.setflags(write=False)
        return out

    @cached_property
    def gram_minus(self) -> np.ndarray:
        """``H[i, j] = l(a_i a_j*)``, the right Hilbert form."""
        products = self.structure @ self.functional
        out = products @ self.involution.T
        out.setflags(write=False)
        return out


@dataclass(frozen=True, eq=False)
class Element:
    spec: ItoAlgebraSpec
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=complex).reshape(-1)
        if coords.shape != (self.spec.dim,):
            raise ShapeError(f"element needs {self.spec.dim} coordinates, got {coords.shape[0]}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def spec_id(self) -> str:
        return self.spec.spec_id

    def _same(self, other: "Element"):
        if not isinstance(other, Element):
            return NotImplemented
        if other.spec_id != self.spec_id:
            raise SpecMismatch("elements belong to different algebras")
        return other

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Element(self.spec, self.coords + other.coords)

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return Element(self.spec, self.coords - other.coords)

    def __neg__(self):
        return Element(self.spec, -self.coords)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        if np.isscalar(other):
            return Element(self.spec, self.coords * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Element(self.spec, other * self.coords)
        return NotImplemented

    @property
    def star(self) -> "Element":
        return involve(self)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __repr__(self):
        terms = [f"({c:.6g}){lab}" for c, lab in zip(self.coords, self.spec.labels) if abs(c) > 0]
        return "Element(" + (" + ".join(terms) or "0") + ")"


def multiply(a: Element, b: Element) -> Element:
    a._same(b)
    coords = np.einsum("i,j,ijk->k", a.coords, b.coords, a.spec.structure)
    return Element(a.spec, coords)


def involve(a: Element) -> Element:
    return Element(a.spec, a.coords.conj() @ a.spec.involution)


def functional(a: Element) -> complex:
    return complex(a.coords @ a.spec.functional)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    residual: float

    @property
    def name(self) -> str:
        return "".join(part.capitalize() for part in self.axiom.split("_")) + "Violation"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def axioms(self) -> set:
        return {v.axiom for v in self.violations}


def _scale(*arrays) -> float:
    return max([1e-300] + [float(np.max(np.abs(a))) for a in arrays if np.size(a)])


def _worst(axiom, resid, threshold, out):
    resid = np.asarray(resid)
    if resid.size == 0:
        return
    idx = np.unravel_index(int(np.argmax(resid)), resid.shape)
    worst = float(resid[idx])
    if worst > threshold:
        out.append(Violation(axiom, tuple(int(i) for i in idx), worst))


def validate(spec: ItoAlgebraSpec) -> ValidationReport:
    """Check every Ito *-algebra axiom on basis elements.

    Each violated axiom is reported once, with the basis indices where its
    residual is largest. Thresholds are ``max(tol * scale, 1e-12)`` where
    ``scale`` is the largest entry of the tensors involved.
    """
    n = spec.dim
    c = spec.structure
    s = spec.involution
    theta = spec.death
    ell = spec.functional
    tol = spec.tol
    out: list = []

    # (a_i a_j) a_k - a_i (a_j a_k), one slab per i to bound memory
    assoc = np.zeros((n, n, n))
    for i in range(n):
        left = np.einsum("jm,mkl->jkl", c[i], c)
        right = np.einsum("jkm,ml->jkl", c, c[i])
        assoc[i] = np.max(np.abs(left - right), axis=2)
    _worst("associativity", assoc, max(tol * _scale(c) ** 2, ABS_FLOOR), out)

    ident = np.abs(s.conj() @ s - np.eye(n))
    _worst("involution", ident, max(tol * max(1.0, _scale(s) ** 2), ABS_FLOOR), out)

    left = np.einsum("ijk,kl->ijl", c.conj(), s)
    right = np.einsum("jp,iq,pqk->ijk", s, s, c)
    anti = np.max(np.abs(left - right), axis=2)
    _worst("anti_automorphism", anti, max(tol * _scale(c) * _scale(s) ** 2, ABS_FLOOR), out)

    left_kill = np.max(np.abs(np.einsum("i,ijk->jk", theta, c)), axis=1)
    right_kill = np.max(np.abs(np.einsum("j,ijk->ik", theta, c)), axis=1)
    _worst("death_annihilation", np.maximum(left_kill, right_kill),
           max(tol * _scale(c) * _scale(theta), ABS_FLOOR), out)

    _worst("death_self_adjoint", np.abs(theta.conj() @ s - theta),
           max(tol * _scale(theta) * _scale(s), ABS_FLOOR), out)

    _worst("functional_star", np.abs(s @ ell - ell.conj()),
           max(tol * _scale(ell) * _scale(s), ABS_FLOOR), out)

    _worst("normalization", np.abs(np.atleast_1d(theta @ ell - 1.0)),
           max(tol * _scale(theta) * _scale(ell), ABS_FLOOR), out)

    g = spec.gram
    gscale = _scale(g)
    herm = np.abs(g - g.conj().T)
    _worst("gram_hermitian", herm, max(tol * gscale, ABS_FLOOR), out)
    evals, evecs = np.linalg.eigh((g + g.conj().T) / 2)
    if evals[0] < -max(tol * gscale, ABS_FLOOR):
        lead = int(np.argmax(np.abs(evecs[:, 0])))
        out.append(Violation("gram_psd", (lead,), float(-evals[0])))
    return ValidationReport(tuple(out))


# --------------------------------------------------------------------------
# change of basis


def change_basis(spec: ItoAlgebraSpec, new_basis, labels=None, tol=None) -> ItoAlgebraSpec:
    """Re-express ``spec`` in the basis given by the columns of ``new_basis``.

    Column ``j`` holds the old coordinates of new basis vector ``j``. Builder
    metadata (vacuum read-out maps) is carried along.
    """
    t = np.asarray(new_basis, dtype=complex)
    n = spec.dim
    if t.shape != (n, n):
        raise ShapeError(f"basis change must be {n}x{n}")
    tinv = np.linalg.inv(t)
    prods = np.einsum("ip,jq,ijk->pqk", t, t, spec.structure)
    structure = np.einsum("pqk,lk->pql", prods, tinv)
    # (sum_i t_ij a_i)* = sum_i conj(t_ij) a_i*
    inv_old = t.conj().T @ spec.involution
    involution = inv_old @ tinv.T
    meta = dict(spec.meta)
    vac = meta.get("vacuum")
    if vac is not None:
        meta["vacuum"] = {
            "m": vac["m"],
            "x_map": np.asarray(vac["x_map"]) @ t,
            "y_map": np.asarray(vac["y_map"]) @ t,
            "ops": np.einsum("ij,ipq->jpq", t, np.asarray(vac["ops"])),
        }
    return ItoAlgebraSpec(
        dim=n,
        labels=tuple(labels) if labels is not None else spec.labels,
        structure=structure,
        involution=involution,
        death=tinv @ spec.death,
        functional=spec.functional @ t,
        tol=spec.tol if tol is None else tol,
        meta=meta,
    )
