import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itoalg import builders
from itoalg.algebra import involve, multiply
from itoalg.errors import GNSInconsistent, RankMismatch
from itoalg.representation import (Quadruple, build_rep, convolve, from_matrix, image,
                                   kolmogorov_factor, metric_adjoint, minkowski_metric,
                                   quadruple, to_matrix)

from conftest import ALL, rand_coords
import oracles


def test_kolmogorov_factor_reproduces_gram(any_spec):
    rep = build_rep(any_spec)
    k = rep.kolmogorov
    assert np.allclose(k.conj().T @ k, oracles.gram(any_spec), atol=1e-10)


def test_gns_is_left_action(any_spec):
    rep = build_rep(any_spec)
    n = any_spec.dim
    for i in range(n):
        for j in range(n):
            ij = oracles.product(any_spec, np.eye(n)[i], np.eye(n)[j])
            assert np.allclose(rep.gns[i] @ rep.kolmogorov[:, j], rep.kolmogorov @ ij, atol=1e-10)


def test_gns_is_dagger_representation(any_spec):
    rep = build_rep(any_spec)
    for i, a in enumerate(any_spec.basis_elements()):
        assert np.allclose(rep.op(involve(a)), rep.gns[i].conj().T, atol=1e-10)


def test_newton_rank_zero():
    rep = build_rep(builders.newton())
    assert rep.rank == 0
    q = quadruple(rep, builders.newton().theta)
    assert q.alpha == 1 and q.ket.size == 0


@pytest.mark.parametrize("d", [1, 2, 3])
def test_closed_forms(d):
    for spec, closed in ((builders.wiener(d), oracles.closed_quadruple_wiener),
                         (builders.poisson(d), oracles.closed_quadruple_poisson)):
        rep = build_rep(spec)
        for i, a in enumerate(spec.basis_elements()):
            q = quadruple(rep, a)
            alpha, ket, bra, op = closed(spec, i)
            assert abs(q.alpha - alpha) < 1e-12
            assert np.max(np.abs(q.ket - ket)) < 1e-12
            assert np.max(np.abs(q.bra - bra)) < 1e-12
            assert np.max(np.abs(q.op - op)) < 1e-12


def test_mixed_example_quadruples():
    s = builders.orthogonal_sum(builders.wiener(1), builders.poisson(1))
    rep = build_rep(s)
    assert rep.rank == 2
    qw = quadruple(rep, s.basis("w1"))
    qp = quadruple(rep, s.basis("p1"))
    assert np.max(np.abs(qw.op)) < 1e-15
    assert np.isclose(np.linalg.norm(qp.ket), 1) and np.isclose(np.linalg.norm(qw.ket), 1)
    assert abs(np.vdot(qp.ket, qw.ket)) < 1e-15


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), name=st.sampled_from(sorted(ALL)))
def test_homomorphism_property(seed, name):
    spec = ALL[name]
    rep = build_rep(spec)
    rng = np.random.default_rng(seed)
    a, b = (spec.element(rand_coords(rng, spec.dim)) for _ in range(2))
    qa, qb = quadruple(rep, a), quadruple(rep, b)
    scale = max(1.0, qa.max_abs() * qb.max_abs())
    assert (quadruple(rep, multiply(a, b)) - convolve(qa, qb)).max_abs() <= 1e-10 * scale
    prod = (image(rep, a) @ image(rep, b)).mat
    assert np.max(np.abs(prod - image(rep, multiply(a, b)).mat)) <= 1e-10 * scale
    assert np.max(np.abs(metric_adjoint(image(rep, a)).mat - image(rep, involve(a)).mat)) \
        <= 1e-10 * max(1.0, qa.max_abs())


def test_matrix_round_trip():
    rep = build_rep(builders.random_algebra(2, kind="mixed"))
    a = rep.spec.element(rand_coords(np.random.default_rng(0), rep.spec.dim))
    q = quadruple(rep, a)
    back = from_matrix(to_matrix(q))
    assert (back - q).max_abs() == 0
    m = to_matrix(q).mat
    assert np.all(m[:, 0] == 0) and np.all(m[-1, :] == 0)


def test_minkowski_metric():
    g = minkowski_metric(2)
    assert np.array_equal(g @ g, np.eye(4))
    assert g[0, 3] == 1 and g[3, 0] == 1 and g[0, 0] == 0


def test_rank_mismatch():
    q1 = Quadruple(0j, np.zeros(1), np.zeros(1), np.zeros((1, 1)))
    q2 = Quadruple(0j, np.zeros(2), np.zeros(2), np.zeros((2, 2)))
    with pytest.raises(RankMismatch):
        convolve(q1, q2)


def test_gns_inconsistent():
    # Gram kernel that is not a left ideal: theta-like vector z with l(z* z) = 0 but
    # w z = w, so the ket of w z is nonzero
    from itoalg.algebra import ItoAlgebraSpec
    c = np.zeros((3, 3, 3), dtype=complex)
    c[1, 1, 0] = 1  # w w = theta
    c[1, 2, 1] = 1  # w z = w
    spec = ItoAlgebraSpec(dim=3, labels=("theta", "w", "z"), structure=c,
                          involution=np.eye(3), death=np.array([1, 0, 0]),
                          functional=np.array([1, 0, 0]))
    with pytest.raises(GNSInconsistent):
        build_rep(spec)


def test_rank_stable_under_perturbation():
    for name in ("wiener3", "poisson2", "thermal2", "vacuum2_full", "mixed_wp"):
        g = np.asarray(ALL[name].gram)
        rank = build_rep(ALL[name]).rank
        rng = np.random.default_rng(1)
        e = rand_coords(rng, g.shape[0], g.shape[0])
        e = 1e-14 * (e + e.conj().T)
        _, k, _ = kolmogorov_factor(g + e, 1e-9)
        assert k.shape[0] == rank
