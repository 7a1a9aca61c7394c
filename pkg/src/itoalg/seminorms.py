"""The four seminorms of an Ito algebra and the axioms relating them.

    ||a||      largest singular value of the GNS matrix i(a)
    ||a||_+    sqrt(l(a* a)) = |k(a)|
    ||a||^-    sqrt(l(a a*)) = |k(a*)|
    ||a||_+^-  |l(a)|

The operator seminorm also has a variational form
``||a|| = sup |l(c' a c)| / (||c'||^- ||c||_+)`` that only uses the algebra;
:func:`boundedness_lower_bound` searches it as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Element, functional, involve, multiply
from .linalg import null_space
from .representation import FundamentalRep

NAMES = ("operator", "plus", "minus", "plus_minus")


def seminorms(rep: FundamentalRep, a: Element) -> tuple:
    """``(||a||, ||a||_+, ||a||^-, ||a||_+^-)``."""
    rep._check(a)
    op = rep.op(a)
    op_norm = float(np.linalg.norm(op, 2)) if op.size else 0.0
    plus = float(np.linalg.norm(rep.kolmogorov @ a.coords))
    minus = float(np.linalg.norm(rep.kolmogorov @ involve(a).coords))
    return op_norm, plus, minus, abs(functional(a))


@dataclass
class SeminormReport:
    values: np.ndarray  # (N, 4), columns as in NAMES
    residuals: dict = field(default_factory=dict)  # axiom -> largest relative violation

    @property
    def max_violation(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def passed(self, tol=1e-9) -> bool:
        return self.max_violation <= tol


def _rel(lhs, rhs, scale):
    return abs(lhs - rhs) / max(1.0, scale)


def _excess(lhs, rhs):
    return max(0.0, lhs - rhs) / max(1.0, rhs)


def check_axioms(rep: FundamentalRep, sample) -> SeminormReport:
    """Star relations, product inequalities and B*-equalities on ``sample``.

    Products are checked on consecutive pairs ``(sample[i], sample[i+1])``,
    wrapping around, and on each element with itself.
    """
    sample = list(sample)
    norms = [seminorms(rep, a) for a in sample]
    stars = [involve(a) for a in sample]
    star_norms = [seminorms(rep, s) for s in stars]
    res = {k: 0.0 for k in ("star_operator", "star_plus_minus", "star_functional",
                             "product_operator", "product_plus", "product_minus",
                             "product_functional", "bstar_operator", "bstar_functional")}

    def bump(key, value):
        res[key] = max(res[key], value)

    for (n_a, p_a, m_a, f_a), (n_s, p_s, m_s, f_s) in zip(norms, star_norms):
        bump("star_operator", _rel(n_s, n_a, n_a))
        bump("star_plus_minus", max(_rel(p_s, m_a, m_a), _rel(m_s, p_a, p_a)))
        bump("star_functional", _rel(f_s, f_a, f_a))

    count = len(sample)
    pairs = [(i, (i + 1) % count) for i in range(count)] + [(i, i) for i in range(count)]
    for i, j in pairs:
        n_a, _, m_a, _ = norms[i]
        n_c, p_c, _, _ = norms[j]
        n_ac, p_ac, m_ac, f_ac = seminorms(rep, multiply(sample[i], sample[j]))
        bump("product_operator", _excess(n_ac, n_a * n_c))
        bump("product_plus", _excess(p_ac, n_a * p_c))
        bump("product_minus", _excess(m_ac, m_a * n_c))
        bump("product_functional", _excess(f_ac, m_a * p_c))

    for a, s, (n_a, p_a, _, _), (n_s, _, m_s, _) in zip(sample, stars, norms, star_norms):
        n_sa, _, _, f_sa = seminorms(rep, multiply(s, a))
        bump("bstar_operator", _rel(n_sa, n_s * n_a, n_s * n_a))
        bump("bstar_functional", _rel(f_sa, m_s * p_a, m_s * p_a))

    return SeminormReport(values=np.array(norms, dtype=float).reshape(-1, 4), residuals=res)


def random_elements(spec, count, seed=0):
    """Complex-Gaussian elements, deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    coords = rng.standard_normal((count, spec.dim)) + 1j * rng.standard_normal((count, spec.dim))
    return [spec.element(c) for c in coords]


def boundedness_lower_bound(rep: FundamentalRep, a: Element, trials: int = 10_000,
                            seed: int = 0, chains: int = 20) -> float:
    """Lower bound for ``sup |l(c' a c)| / (||c'||^- ||c||_+)``.

    Only algebra operations enter: the bilinear form ``l(a_i a a_j)`` and the
    two Gram forms are tabulated, then ``chains`` independent adaptive
    random-walk hill climbs share the ``trials`` evaluations. Each chain gets
    its own seed spawned from ``seed``.
    """
    rep._check(a)
    spec = a.spec
    n = spec.dim
    # l(a_i a a_j)
    left = np.einsum("i,kil->kl", a.coords, spec.structure)  # a_k a = sum_l left[k,l] a_l
    prod = np.einsum("kl,ljm->kjm", left, spec.structure)
    bil = prod @ spec.functional
    g_plus = np.asarray(spec.gram)
    g_minus = np.asarray(spec.gram_minus)
    scale = max(1.0, float(np.max(np.abs(g_plus))), float(np.max(np.abs(g_minus))))
    floor = 1e-6 * np.sqrt(scale)

    def ratio(x, y):
        # rows of x, y are the chains
        num = np.abs(np.einsum("ci,ij,cj->c", x, bil, y))
        dm = np.sqrt(np.maximum(np.einsum("ci,ij,cj->c", x, g_minus, x.conj()).real, 0.0))
        dp = np.sqrt(np.maximum(np.einsum("ci,ij,cj->c", y.conj(), g_plus, y).real, 0.0))
        ok = (dm > floor * np.linalg.norm(x, axis=1)) & (dp > floor * np.linalg.norm(y, axis=1))
        return np.where(ok, num / np.where(ok, dm * dp, 1.0), 0.0)

    chains = max(1, min(chains, trials))
    steps = max(1, trials // chains)
    rngs = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(chains)]

    def gauss():
        z = np.array([g.standard_normal(2 * n) for g in rngs])
        return z[:, :n] + 1j * z[:, n:]

    x, y = gauss(), gauss()
    cur = ratio(x, y)
    step = np.full(chains, 0.5)
    for _ in range(steps - 1):
        kx = (step * np.linalg.norm(x, axis=1) / np.sqrt(2 * n))[:, None]
        ky = (step * np.linalg.norm(y, axis=1) / np.sqrt(2 * n))[:, None]
        x2, y2 = x + kx * gauss(), y + ky * gauss()
        val = ratio(x2, y2)
        up = val > cur
        x = np.where(up[:, None], x2, x)
        y = np.where(up[:, None], y2, y)
        cur = np.where(up, val, cur)
        step = np.where(up, np.minimum(step * 1.2, 2.0), np.maximum(step * 0.9, 1e-4))
    best = float(np.max(cur))
    return float(best)


def joint_kernel(rep: FundamentalRep) -> np.ndarray:
    """Elements on which all four seminorms vanish, as columns."""
    spec = rep.spec
    n, r = spec.dim, rep.rank
    rows = [spec.functional.reshape(1, -1), rep.kolmogorov,
            rep.kolmogorov @ spec.involution.T]
    # |k(a*)| = 0 is conjugate-linear in a; conj of the rows gives a linear condition
    rows[2] = rows[2].conj()
    if r:
        rows.append(np.asarray(rep.gns).reshape(n, r * r).T)
    return null_space(np.vstack(rows))
