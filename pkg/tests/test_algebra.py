import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itoalg import builders
from itoalg.algebra import (ItoAlgebraSpec, change_basis, functional, involve, multiply,
                            validate)
from itoalg.errors import ShapeError, SpecMismatch

from conftest import BUILDERS, rand_coords
import oracles


def _tampered(spec, **changes):
    fields = dict(dim=spec.dim, labels=spec.labels, structure=np.array(spec.structure),
                  involution=np.array(spec.involution), death=np.array(spec.death),
                  functional=np.array(spec.functional), tol=spec.tol)
    fields.update(changes)
    return ItoAlgebraSpec(**fields)


def test_wiener_square_is_theta():
    s = builders.wiener(1)
    w = s.basis("w1")
    assert np.array_equal(multiply(w, w).coords, s.theta.coords)


def test_theta_annihilates(any_spec):
    th = any_spec.theta
    for a in any_spec.basis_elements():
        assert multiply(th, a).norm() <= 1e-12
        assert multiply(a, th).norm() <= 1e-12


def test_poisson_square():
    s = builders.poisson(1)
    p = s.basis("p1")
    assert np.array_equal(multiply(p, p).coords, (s.theta + p).coords)


def test_involution_examples():
    s = builders.wiener(1)
    w = s.basis(1)
    assert np.array_equal(involve(w).coords, w.coords)
    assert np.array_equal(involve(s.theta).coords, s.theta.coords)
    assert np.allclose(involve(1j * w).coords, (-1j * w).coords, atol=0)


def test_functional_examples():
    s = builders.wiener(1)
    assert functional(s.theta) == 1
    assert functional(s.basis(1)) == 0
    assert functional(2 * s.theta + 3 * s.basis(1)) == 2


def test_mixing_specs_raises():
    a = builders.wiener(1).basis(1)
    b = builders.poisson(1).basis(1)
    with pytest.raises(SpecMismatch):
        multiply(a, b)
    with pytest.raises(SpecMismatch):
        a + b


def test_multiply_matches_triple_loop(any_spec):
    rng = np.random.default_rng(0)
    for _ in range(5):
        u, v = rand_coords(rng, any_spec.dim), rand_coords(rng, any_spec.dim)
        got = multiply(any_spec.element(u), any_spec.element(v)).coords
        assert np.allclose(got, oracles.product(any_spec, u, v), atol=1e-12)


def test_gram_matches_oracle(any_spec):
    assert np.allclose(any_spec.gram, oracles.gram(any_spec), atol=1e-12)


def test_wiener2_gram():
    assert np.array_equal(builders.wiener(2).gram, np.diag([0, 1, 1]).astype(complex))


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_random_pairs_bilinear_associative(name):
    spec = BUILDERS[name]
    rng = np.random.default_rng(1)
    n = spec.dim
    for _ in range(200):
        a, b, c = (spec.element(rand_coords(rng, n)) for _ in range(3))
        s = complex(rng.standard_normal(), rng.standard_normal())
        scale = max(1.0, a.norm() * b.norm() * c.norm())
        assert (multiply(a, b + s * c) - multiply(a, b) - s * multiply(a, c)).norm() <= 1e-12 * scale
        assert (multiply(multiply(a, b), c) - multiply(a, multiply(b, c))).norm() <= 1e-12 * scale
        assert (involve(involve(a)) - a).norm() <= 1e-12 * max(1.0, a.norm())
        lhs = involve(multiply(a, b))
        rhs = multiply(involve(b), involve(a))
        assert (lhs - rhs).norm() <= 1e-12 * scale
        q = functional(multiply(involve(a), a))
        assert abs(q.imag) <= 1e-12 * a.norm() ** 2
        assert q.real >= -spec.tol * a.norm() ** 2


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), name=st.sampled_from(sorted(BUILDERS)))
def test_gram_positive_property(seed, name):
    spec = BUILDERS[name]
    a = spec.element(rand_coords(np.random.default_rng(seed), spec.dim))
    q = functional(multiply(involve(a), a))
    assert q.real >= -1e-12 * max(1.0, a.norm() ** 2)
    assert abs(q.imag) <= 1e-12 * max(1.0, a.norm() ** 2)


def test_builders_validate(any_spec):
    assert validate(any_spec).passed


def test_normalization_violation():
    s = builders.wiener(1)
    ell = np.array(s.functional)
    ell[0] = 0
    rep = validate(_tampered(s, functional=ell))
    assert not rep.passed
    (v,) = [v for v in rep.violations if v.axiom == "normalization"]
    assert v.name == "NormalizationViolation"
    assert v.residual == pytest.approx(1.0)


def test_cubic_wiener_injection_is_still_associative():
    # w.w = theta + w is the Poisson relation; both association orders agree
    s = builders.wiener(1)
    c = np.array(s.structure)
    c[1, 1, 1] = 1
    assert validate(_tampered(s, structure=c)).passed


def test_associativity_violation_witness():
    s = builders.wiener(2)
    c = np.array(s.structure)
    c[1, 2, 1] = 1  # w1 w2 = w1: (w1 w2) w2 = w1 but w1 (w2 w2) = 0
    rep = validate(_tampered(s, structure=c))
    assoc = [v for v in rep.violations if v.axiom == "associativity"]
    assert assoc and assoc[0].residual >= 1 - 1e-12
    i, j, k = assoc[0].witness
    ci = np.array(c)
    left = np.einsum("ijm,mkl->ijkl", ci, ci)[i, j, k]
    right = np.einsum("jkm,iml->ijkl", ci, ci)[i, j, k]
    assert np.max(np.abs(left - right)) >= 1 - 1e-12


def test_non_selfadjoint_theta_detected():
    s = builders.poisson(1)
    inv = np.array(s.involution)
    inv[0, 1] = 1.0
    assert not validate(_tampered(s, involution=inv)).passed


def test_indefinite_gram_detected():
    s = builders.wiener(1)
    c = np.array(s.structure)
    c[1, 1, 0] = -1
    rep = validate(_tampered(s, structure=c))
    assert "gram_psd" in rep.axioms()


def test_shape_error():
    s = builders.wiener(1)
    with pytest.raises(ShapeError):
        _tampered(s, functional=np.ones(3))
    with pytest.raises(ShapeError):
        _tampered(s, structure=np.zeros((2, 2, 3)))


def test_elements_are_immutable():
    s = builders.wiener(1)
    with pytest.raises(ValueError):
        s.structure[0, 0, 0] = 1


def test_change_basis_preserves_axioms_and_products():
    s = builders.orthogonal_sum(builders.wiener(1), builders.poisson(2))
    rng = np.random.default_rng(3)
    t = np.eye(s.dim, dtype=complex) + 0.4 * rand_coords(rng, s.dim, s.dim)
    s2 = change_basis(s, t)
    assert validate(s2).passed
    u, v = rand_coords(rng, s.dim), rand_coords(rng, s.dim)
    # element with new coordinates u is t @ u in the old basis
    lhs = t @ multiply(s2.element(u), s2.element(v)).coords
    rhs = multiply(s.element(t @ u), s.element(t @ v)).coords
    assert np.allclose(lhs, rhs, atol=1e-10)
    assert np.isclose(functional(s2.element(u)), functional(s.element(t @ u)))
    assert np.allclose(t @ involve(s2.element(u)).coords, involve(s.element(t @ u)).coords)
