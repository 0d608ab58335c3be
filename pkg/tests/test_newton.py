from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from overcert.errors import PreconditionFailed
from overcert.newton import (
    ALPHA_SAME,
    ALPHA_THRESHOLD,
    Candidate,
    RateSchedule,
    alpha_below_threshold,
    beta,
    certify_candidate,
    certify_square,
    distinct,
    gamma_bound,
    newton_step,
    refine,
    same_root,
    separate_all,
)
from overcert.poly import Polynomial, PolySystem
from overcert.scalar import QI


def univariate(text):
    return PolySystem([Polynomial.parse(text, ("z",))], ("z",))


SQ = univariate("z^2 - 1")


def exact_point(*xs):
    return tuple(QI(Fraction(x)) for x in xs)


class TestThreshold:
    def test_constant_value(self):
        assert ALPHA_THRESHOLD == pytest.approx((13 - 3 * math.sqrt(17)) / 4, rel=1e-15)

    def test_exact_decision_brackets_constant(self):
        below = Fraction(157670780786754, 10**15)
        above = Fraction(157670780786755, 10**15)
        assert alpha_below_threshold(below)
        assert not alpha_below_threshold(above)

    def test_float_decision(self):
        assert alpha_below_threshold(0.1576)
        assert not alpha_below_threshold(0.1577)


class TestNewtonStep:
    def test_hand_oracle(self):
        assert newton_step(SQ, exact_point(2)) == exact_point(Fraction(5, 4))

    def test_affine_lands_on_root(self):
        g = PolySystem([Polynomial.parse("2*z1 - z2 + 3", ("z1", "z2")),
                        Polynomial.parse("z1 + 4*z2 - 1/2", ("z1", "z2"))])
        root = newton_step(g, exact_point(7, -11))
        assert g(root) == [0, 0]

    def test_fixed_point_at_root(self):
        assert newton_step(SQ, exact_point(1)) == exact_point(1)


class TestBeta:
    def test_root(self):
        assert beta(SQ, exact_point(-1)) == 0

    def test_hand_oracle(self):
        assert beta(SQ, exact_point(2)) == Fraction(3, 4)

    def test_affine_unit_distance(self):
        g = PolySystem([Polynomial.parse("z1 - 1", ("z1", "z2")), Polynomial.parse("z2", ("z1", "z2"))])
        assert beta(g, exact_point(2, 0)) == 1

    def test_float_includes_rounding_allowance(self):
        b = beta(SQ, (2.0,))
        assert 0.75 <= b < 0.75 + 1e-12


class TestGamma:
    def test_linear_system_finite(self):
        g = PolySystem([Polynomial.parse("z1 + z2", ("z1", "z2")), Polynomial.parse("z1 - z2 + 1", ("z1", "z2"))])
        gm = gamma_bound(g, exact_point(0, 0))
        assert gm >= 0 and math.isfinite(float(gm))

    def test_univariate_sup_oracle(self):
        # gamma = |f''/(2 f')| = 1/2 at z = 1
        assert gamma_bound(SQ, exact_point(1)) >= Fraction(1, 2)
        assert gamma_bound(SQ, (1.0,)) >= 0.5

    def test_scaling_invariance(self):
        g2 = univariate("7*z^2 - 7")
        z = exact_point(Fraction(3, 2))
        assert gamma_bound(g2, z) == gamma_bound(SQ, z)


def _true_alpha(z):
    # univariate alpha for z^2 - 1 (only k = 2 contributes to gamma)
    f, df = z * z - 1, 2 * z
    return abs(f / df) * abs(1 / df)


class TestCertifySquare:
    def test_near_root(self):
        z = exact_point(Fraction(10001, 10000))
        cert = certify_square(SQ, z)
        assert cert.certified
        assert cert.alpha_upper >= Fraction(_true_alpha(Fraction(10001, 10000)))
        c = certify_candidate(SQ, z)
        assert c.rho <= 2 * cert.beta_upper

    def test_float_near_root(self):
        cert = certify_square(SQ, (1.0001,))
        assert cert.certified and cert.alpha_upper >= _true_alpha(1.0001)

    def test_critical_point(self):
        cert = certify_square(SQ, exact_point(0))
        assert not cert.certified and "singular" in cert.diagnostic
        cert = certify_square(SQ, (0.0,))
        assert not cert.certified and "singular" in cert.diagnostic

    def test_far_point_not_certified(self):
        assert not certify_square(SQ, exact_point(Fraction(1, 3))).certified

    def test_record(self):
        rec = certify_square(SQ, exact_point(Fraction(101, 100))).to_record()
        assert rec["mode"] == "exact" and rec["certified"] is True
        assert Fraction(rec["alpha_upper"]) > 0


class TestDistinct:
    def _c(self, x, rho):
        return Candidate((complex(x),), rho=rho)

    def test_identical(self):
        assert not distinct(self._c(0, 0.1), self._c(0, 0.1))

    def test_separated(self):
        assert distinct(self._c(0, 0.4), self._c(1, 0.4))

    def test_overlapping(self):
        assert not distinct(self._c(0, 0.6), self._c(1, 0.6))

    def test_exact(self):
        a = Candidate(exact_point(0), rho=Fraction(1, 2))
        b = Candidate(exact_point(1), rho=Fraction(1, 2))
        assert not distinct(a, b)

    def test_needs_radii(self):
        with pytest.raises(PreconditionFailed):
            distinct(Candidate((0j,)), self._c(1, 0.1))


class TestSameRoot:
    def test_zero_distance(self):
        cert = certify_square(SQ, exact_point(Fraction(1001, 1000)))
        assert same_root(SQ, cert, cert.point)

    def test_outside_radius(self):
        cert = certify_square(SQ, exact_point(Fraction(1001, 1000)))
        d = 1 / (10 * cert.gamma_upper)
        assert not same_root(SQ, cert, (cert.point[0] + d,))

    def test_refinement_is_same_root(self):
        z = (1.001,)
        cert = certify_square(SQ, z)
        assert same_root(SQ, cert, newton_step(SQ, z))

    def test_requires_small_alpha(self):
        cert = certify_square(SQ, exact_point(Fraction(11, 10)))
        assert cert.certified and cert.alpha_upper >= ALPHA_SAME
        with pytest.raises(PreconditionFailed):
            same_root(SQ, cert, cert.point)


class TestRefine:
    def test_zero_steps(self):
        c = certify_candidate(SQ, (1.1,))
        assert refine(SQ, c, 0) is c

    def test_converges_to_sqrt2(self):
        g = univariate("z^2 - 2")
        c = refine(g, certify_candidate(g, (1.5,)), 4)
        assert abs(c.point[0] - math.sqrt(2)) < 1e-10

    def test_schedule(self):
        s = RateSchedule(Fraction(1, 8))
        assert s.rate(0) == Fraction(1, 8)
        assert s.rate(3) == Fraction(1, 8) / 16
        assert RateSchedule(0.125).rate(3) == 0.125 / 16

    def test_exact_schedule_radius(self):
        z = exact_point(Fraction(1001, 1000))
        c = certify_candidate(SQ, z)
        r = refine(SQ, c, 3, precision=10**6)
        assert r.rho == c.schedule.rate(3) == c.rho / 16

    def test_exact_rounding_recertifies(self):
        c = certify_candidate(SQ, exact_point(Fraction(1001, 1000)))
        r = refine(SQ, c, 3)
        assert r.certified and r.certificate is not None
        assert r.point[0].re.denominator <= 2**212

    def test_recertify_flag(self):
        c = certify_candidate(SQ, (1.01,))
        r = refine(SQ, c, 2, recertify=True)
        assert r.certificate.point == r.point

    def test_singular_stop(self):
        c = Candidate(exact_point(0), rho=Fraction(1))
        r = refine(SQ, c, 2)
        assert r.flag and r.point == c.point


class TestSeparateAll:
    def test_two_roots_kept(self):
        S = [certify_candidate(SQ, (1.01,)), certify_candidate(SQ, (-0.99,))]
        out = separate_all(SQ, S)
        assert len(out) == 2 and distinct(out[0], out[1])

    def test_duplicates_merged(self):
        S = [certify_candidate(SQ, (1.0001,)), certify_candidate(SQ, (1.0002,)), certify_candidate(SQ, (0.9999,))]
        assert len(separate_all(SQ, S)) == 1

    def test_quartics_sixteen(self, quartics):
        q, g, S = quartics
        out = separate_all(g, S)
        assert len(out) == 16
        assert all(distinct(a, b) for i, a in enumerate(out) for b in out[i + 1:])


def test_float_alpha_dominates_exact_alpha_on_quartic_roots(quartics):
    # the soft beta carries a rounding allowance, the exact one does not
    q, g, S = quartics
    for c in S[:4]:
        ce = certify_candidate(g, c.to_exact())
        assert ce.certified
        assert float(ce.certificate.alpha_upper) <= float(c.certificate.alpha_upper) * (1 + 1e-9)


def test_gamma_float_exact_consistency():
    g = PolySystem([Polynomial.parse("z1^2 + z2^3 - 2", ("z1", "z2")), Polynomial.parse("z1*z2 - 1", ("z1", "z2"))])
    z = (1.0 + 0.01j, 1.0 - 0.02j)
    ge = gamma_bound(g, tuple(QI(Fraction(x.real), Fraction(x.imag)) for x in z))
    gf = gamma_bound(g, z)
    assert gf == pytest.approx(float(ge), rel=1e-9)
    assert np.isfinite(gf)
