from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from overcert.newton import Candidate, beta, certify_candidate, distinct, refine
from overcert.poly import Polynomial, PolySystem, deriv_ell1_bound, eval_poly, partial, taylor_coefficients
from overcert.residual import taylor_residual
from overcert.scalar import QI

from property_checks import (
    affine_newton_exact,
    gamma_soundness,
    jacobian_fd_errors,
    random_point,
    random_system,
    residual_soundness,
)

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)
qis = st.builds(QI, rats, rats)
exps2 = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys2 = st.dictionaries(exps2, qis, max_size=6).map(lambda t: Polynomial(2, t))
points2 = st.tuples(qis, qis)


@given(polys2, polys2, points2)
def test_eval_is_a_ring_homomorphism(p, q, z):
    assert eval_poly(p + q, z) == eval_poly(p, z) + eval_poly(q, z)
    assert eval_poly(p * q, z) == eval_poly(p, z) * eval_poly(q, z)


@given(polys2, st.integers(0, 1), st.integers(0, 1))
def test_partials_commute(p, i, j):
    ei = tuple(int(k == i) for k in range(2))
    ej = tuple(int(k == j) for k in range(2))
    assert partial(partial(p, ei), ej) == partial(partial(p, ej), ei)


@given(polys2)
def test_exact_representation_is_normalized(p):
    q = Polynomial(2, {e: QI(c.re * 3, c.im * 3) for e, c in p.terms.items()}) * Fraction(1, 3)
    assert q == p and hash(q) == hash(p)
    assert all(c != 0 for c in q.terms.values())


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_ell1_bound_dominates_directional_derivatives(seed, n, k):
    rng = np.random.default_rng(seed)
    p = random_system(rng, n, 3).floated.polys[0]
    z = random_point(rng, n)
    bound = deriv_ell1_bound(p, z, k)
    tc = taylor_coefficients(p, z)
    for _ in range(20):
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        w /= np.linalg.norm(w)
        v = sum(c * np.prod(w ** np.array(a)) for a, c in tc.items() if sum(a) == k)
        assert abs(v) <= bound * (1 + 1e-12) + 1e-12


def test_jacobian_matches_finite_differences():
    assert max(jacobian_fd_errors(systems=30, seed=1)) <= 1e-6


def test_gamma_bound_dominates_samples():
    assert gamma_soundness(trials=40, seed=1) == []


def test_affine_newton_is_exact():
    assert affine_newton_exact(instances=20, seed=1) == 20


@given(polys2, points2, rats.filter(lambda r: r >= 0), rats.filter(lambda r: r >= 0))
def test_residual_monotone_in_radius(p, z, r1, r2):
    lo, hi = sorted((r1, r2))
    assert taylor_residual(p, z, lo) >= taylor_residual(p, z, hi)


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_residual_sound_on_random_balls(seed):
    rng = np.random.default_rng(seed)
    p = random_system(rng, 2, 3).floated.polys[0]
    z = random_point(rng, 2)
    rho = float(rng.uniform(0.001, 0.3))
    assert residual_soundness(p, z, rho, rng, samples=2000) == 0


@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.floats(0.01, 3), st.floats(0.01, 3))
def test_distinct_symmetric_and_antireflexive(a, b, r1, r2):
    c1, c2 = Candidate((a,), rho=r1), Candidate((b,), rho=r2)
    assert distinct(c1, c2) == distinct(c2, c1)
    assert not distinct(c1, c1)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_refine_decreases_beta_in_basin(seed):
    rng = np.random.default_rng(seed)
    g = random_system(rng, 2, 3).floated
    z = random_point(rng, 2)
    from overcert.solver import SolveConfig, damped_newton

    Z = damped_newton(g, np.array([z]), SolveConfig(max_iters=60))
    assume(len(Z) == 1)
    root = tuple(Z[0] + 1e-4 * (rng.normal(size=2) + 1j * rng.normal(size=2)))
    c = certify_candidate(g, root)
    assume(c.certified and c.certificate.alpha_upper < 0.1)
    after = refine(g, c, 1)
    assert beta(g, after.point) <= beta(g, c.point) * (1 + 1e-9) + 1e-14


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_certified_points_converge_under_iteration(seed):
    # a passing certificate must never sit on a diverging Newton sequence
    rng = np.random.default_rng(seed)
    g = random_system(rng, 2, 3).floated
    z = random_point(rng, 2)
    c = certify_candidate(g, z)
    if not c.certified:
        return
    w = np.array(z)
    from overcert.newton import newton_step

    for _ in range(30):
        w = np.array(newton_step(g, tuple(w)))
    assert np.linalg.norm(w - np.array(z)) <= c.rho * (1 + 1e-9) + 1e-12
