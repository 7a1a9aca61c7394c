"""Acceptance criteria, one test each, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import time

import numpy as np
import pytest

from itoalg import builders
from itoalg.algebra import change_basis, involve, multiply
from itoalg.builders import THERMAL, VACUUM
from itoalg.linalg import join, max_angle
from itoalg.representation import build_rep, convolve, image, metric_adjoint, quadruple
from itoalg.seminorms import boundedness_lower_bound, check_axioms, random_elements, seminorms
from itoalg.simulate import (canonical_form, coarsen, ito_table_check, mean_increment,
                             sample_paths)
from itoalg.structure import (compare_decompositions, decompose, decompose_thermal,
                              decompose_vacuum, decomposition_residuals)

from conftest import ALL, BUILDERS, rand_coords
import oracles

pytestmark = pytest.mark.acceptance


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    assert ok, detail


def test_criterion_1_representation_fidelity(capsys):
    start = time.perf_counter()
    worst = 0.0
    for d in (1, 2, 3):
        for spec, closed in ((builders.wiener(d), oracles.closed_quadruple_wiener),
                             (builders.poisson(d), oracles.closed_quadruple_poisson)):
            rep = build_rep(spec)
            for i, a in enumerate(spec.basis_elements()):
                q = quadruple(rep, a)
                alpha, ket, bra, op = closed(spec, i)
                worst = max(worst, abs(q.alpha - alpha), np.max(np.abs(q.ket - ket)),
                            np.max(np.abs(q.bra - bra)), np.max(np.abs(q.op - op)))
    elapsed = time.perf_counter() - start
    report(capsys, 1, "representation fidelity", worst < 1e-12 and elapsed < 1.0,
           f"max residual {worst:.2e}, {elapsed:.3f}s")


def _sample_pairs(spec, rng):
    n = spec.dim
    basis = np.eye(n, dtype=complex)
    pairs = [(basis[i], basis[j]) for i in range(n) for j in range(n)]
    pairs += [(rand_coords(rng, n), rand_coords(rng, n)) for _ in range(200)]
    return pairs


def test_criterion_2_homomorphism(capsys):
    start = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(2)
    for spec in ALL.values():
        rep = build_rep(spec)
        for u, v in _sample_pairs(spec, rng):
            a, b = spec.element(u), spec.element(v)
            qa, qb = quadruple(rep, a), quadruple(rep, b)
            scale = max(1.0, qa.max_abs() * qb.max_abs())
            ab = multiply(a, b)
            worst = max(worst, (quadruple(rep, ab) - convolve(qa, qb)).max_abs() / scale)
            mat = (image(rep, a) @ image(rep, b)).mat
            worst = max(worst, float(np.max(np.abs(mat - image(rep, ab).mat))) / scale)
    elapsed = time.perf_counter() - start
    report(capsys, 2, "homomorphism suite", worst < 1e-10 and elapsed < 10.0,
           f"{len(ALL)} fixtures, max relative residual {worst:.2e}, {elapsed:.2f}s")


def test_criterion_3_metric_involution(capsys):
    worst = 0.0
    rng = np.random.default_rng(2)
    for spec in ALL.values():
        rep = build_rep(spec)
        for u, v in _sample_pairs(spec, rng):
            for w in (u, v):
                a = spec.element(w)
                m = image(rep, a)
                resid = np.max(np.abs(metric_adjoint(m).mat - image(rep, involve(a)).mat))
                worst = max(worst, float(resid) / max(1.0, float(np.max(np.abs(m.mat)))))
    report(capsys, 3, "metric involution", worst < 1e-10, f"max residual {worst:.2e}")


def test_criterion_4_decomposition(capsys):
    worst = {}
    angles = 0.0
    crosses = 0
    for name, spec in ALL.items():
        dec = decompose(spec)
        for key, val in decomposition_residuals(dec).items():
            worst[key] = max(worst.get(key, 0.0), val)
        if VACUUM in spec.families and "vacuum" in spec.meta:
            angles = max(angles, *compare_decompositions(dec, decompose_vacuum(spec)).values())
            crosses += 1
        if THERMAL in spec.families:
            angles = max(angles, *compare_decompositions(dec, decompose_thermal(spec)).values())
            crosses += 1
    ok = max(worst.values()) <= 1e-12 and angles < 1e-8
    detail = ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items()))
    report(capsys, 4, "decomposition theorem", ok,
           f"{detail}; {crosses} cross-checks, max angle {angles:.1e}")


def test_criterion_5_worked_mixed_example(capsys):
    s = builders.orthogonal_sum(builders.wiener(1), builders.poisson(1))
    dec = decompose(s)
    theta, w, p = (s.labels.index(x) for x in ("theta", "w1", "p1"))
    f = dec.idempotent.coords
    errs = [
        np.max(np.abs(f - np.array([1, 0, 1]))),
        abs(dec.alpha(w)), np.max(np.abs(dec.brownian[w] - np.eye(3)[w])), np.max(np.abs(dec.levy[w])),
        abs(dec.alpha(p) + 1), np.max(np.abs(dec.brownian[p])),
        np.max(np.abs(dec.levy[p] - np.array([1, 0, 1]))),
        abs(dec.alpha(theta) - 1), np.max(np.abs(dec.brownian[theta])),
        np.max(np.abs(dec.levy[theta])),
    ]
    worst = float(max(errs))
    report(capsys, 5, "worked mixed example", worst < 1e-12,
           f"f = theta + p, p = -theta + (theta+p); max deviation {worst:.1e}")


def _small_fixtures():
    out = {k: v for k, v in ALL.items() if v.dim <= 4}
    rng = np.random.default_rng(6)
    for name in ("mixed_wp", "vacuum1_scalar", "poisson3", "vacuum1_zero"):
        s = ALL[name]
        t = np.eye(s.dim, dtype=complex)
        t[:, 1:] += 0.3 * rand_coords(rng, s.dim - 1, s.dim)
        out[f"{name}_rotated"] = change_basis(s, t)
    return out


def test_criterion_6_brute_force_oracle(capsys):
    fixtures = _small_fixtures()
    failures = []
    for name, spec in fixtures.items():
        n = spec.dim
        basis = np.eye(n, dtype=complex)
        # n_+ = ker Gram is a left ideal: exhaustive over basis x kernel vectors
        ker = oracles.gram_kernel(spec)
        for i in range(n):
            for col in ker.T:
                if abs(oracles.plus_norm_sq(spec, oracles.product(spec, basis[i], col))) > 1e-10:
                    failures.append(f"{name}: n_+ not a left ideal")
        dec = decompose(spec)
        f = dec.idempotent.coords
        if np.max(np.abs(oracles.product(spec, f, f) - f), initial=0) > 1e-12:
            failures.append(f"{name}: f not idempotent")
        # maximal Brownian subspace from the linear conditions
        b_oracle = oracles.brownian_oracle(spec, f)
        if not oracles.subspace_equal(b_oracle, dec.brownian_basis):
            failures.append(f"{name}: Brownian subspace differs from oracle")
        theta = spec.death / np.linalg.norm(spec.death)
        for u in b_oracle.T:
            if np.max(np.abs(oracles.product(spec, u, f)), initial=0) > 1e-12:
                failures.append(f"{name}: oracle b f != 0")
            for v in b_oracle.T:
                uv = oracles.product(spec, u, v)
                if np.max(np.abs(uv - theta * np.vdot(theta, uv))) > 1e-12:
                    failures.append(f"{name}: bb not in C theta")
        # Levy part equals the iterated product closure (modulo C theta)
        closure = oracles.product_closure(spec, oracles.all_products(spec))
        th = spec.death.reshape(-1, 1)
        if max_angle(join(closure, th), join(dec.levy_basis, th)) >= 1e-8:
            failures.append(f"{name}: Levy subspace differs from product closure")
    report(capsys, 6, "brute-force oracle (dim <= 4)", not failures,
           f"{len(fixtures)} fixtures" + (f"; {failures[:3]}" if failures else ""))


def test_criterion_7_seminorm_axioms(capsys):
    worst = 0.0
    over = 0.0
    for name, spec in ALL.items():
        rep = build_rep(spec)
        worst = max(worst, check_axioms(rep, random_elements(spec, 1000, seed=7)).max_violation)
        for a in random_elements(spec, 2, seed=8):
            over = max(over, boundedness_lower_bound(rep, a, trials=2000) - seminorms(rep, a)[0])
    reach = 1.0
    for d in (1, 2, 3):
        spec = builders.poisson(d)
        rep = build_rep(spec)
        for a in spec.basis_elements()[1:] + random_elements(spec, 3, seed=9):
            norm = seminorms(rep, a)[0]
            val = boundedness_lower_bound(rep, a, trials=10_000)
            over = max(over, val - norm)
            reach = min(reach, val / norm)
    ok = worst <= 1e-9 and over <= 1e-9 and reach >= 0.99
    report(capsys, 7, "seminorm axioms", ok,
           f"axiom violation {worst:.1e}, sampler excess {over:.1e}, poisson reach {reach:.4f}")


def test_criterion_8_ito_table_simulation(capsys):
    start = time.perf_counter()
    seed = 20240
    # Poisson pathwise identity, exact
    p1 = builders.poisson(1)
    ppaths = sample_paths(canonical_form(p1), 1.0, 2.0 ** -14, 200, seed)
    pcheck = ito_table_check(p1, ppaths, (1, 1))
    poisson_exact = bool(np.all(pcheck.realized == pcheck.predicted))
    # Wiener QV at 2^-14, and the halving ratio from 2^-14 to 2^-15 on shared increments
    w1 = builders.wiener(1)
    fine = sample_paths(canonical_form(w1), 1.0, 2.0 ** -15, 200, seed)
    coarse = [coarsen(p, 2) for p in fine]
    c_coarse = ito_table_check(w1, coarse, (1, 1))
    c_fine = ito_table_check(w1, fine, (1, 1))
    qv_err = abs(c_coarse.mean - 1.0)
    ratio = c_coarse.rms_error / c_fine.rms_error
    fitted_c = c_coarse.rms_error / np.sqrt(2.0 ** -14)
    # mean increments on the mixed fixture
    mixed = BUILDERS["mixed_wp"]
    mpaths = sample_paths(canonical_form(mixed, decompose(mixed)), 1.0, 2.0 ** -14, 200, seed)
    means_ok = all(mean_increment(mixed, mpaths, i).within(3) for i in range(mixed.dim))
    # determinism: regenerate a few paths
    again = sample_paths(canonical_form(w1), 1.0, 2.0 ** -15, 3, seed)
    deterministic = all(np.array_equal(a.wiener_increments, b.wiener_increments)
                        for a, b in zip(again, fine))
    elapsed = time.perf_counter() - start
    ok = (poisson_exact and qv_err < 0.02 and 1.3 <= ratio <= 1.6 and means_ok
          and deterministic and elapsed < 60)
    report(capsys, 8, "Ito-table simulation", ok,
           f"poisson exact {poisson_exact}, |mean QV - 1| {qv_err:.4f}, halving ratio {ratio:.3f}, "
           f"C {fitted_c:.3f}, means within 3 stderr {means_ok}, "
           f"deterministic {deterministic}, {elapsed:.1f}s")
