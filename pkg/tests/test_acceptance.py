"""End-to-end acceptance run: one test and one PASS/FAIL line per criterion."""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import quartics_pipeline, record_criterion
from overcert.certify import LiaisonChainSpec, square_up, alg_ind, alg_set, liaison_chain, liaison_classify
from overcert.fixtures import (
    ahs18_fixture,
    catalan,
    essential_fixture,
    kostka,
    quartics_fixture,
    rnc_fixture,
    schubert_fixture,
)
from overcert.newton import ALPHA_THRESHOLD, certify_candidate, certify_square, distance, distinct, refine
from overcert.residual import residual_report
from overcert.rootcount import (
    FailsAt,
    RootCountInput,
    VerifiedUpTo,
    basis_values,
    d_L,
    khovanskii_verify,
    lattice_index,
    okounkov_body,
    volume,
)
from overcert.scalar import QI
from overcert.solver import SolveConfig, multistart_solve

from property_checks import (
    affine_newton_exact,
    gamma_soundness,
    jacobian_fd_errors,
    residual_soundness,
)


def _close(z, target, tol) -> bool:
    return max(abs(complex(a) - complex(b)) for a, b in zip(z, target)) <= tol


def _near_any(z, targets, tol) -> bool:
    return any(_close(z, t, tol) for t in targets)


def test_criterion_1_quartics_end_to_end():
    t0 = time.time()
    q = quartics_fixture()
    g, _ = square_up(q.f, seed=42)
    S = multistart_solve(g, SolveConfig(starts=1000, seed=0))
    ind = alg_ind(q.f, g, 12, S)
    secs = time.time() - t0
    roots = [(4, 4), (-3, -1), (-1, -1), (3, 3)]
    ok = (
        len(S) == 16
        and all(c.certified for c in S)
        and all(distinct(a, b) for i, a in enumerate(S) for b in S[i + 1:])
        and ind.rejected == 12
        and len(ind.certified) == 4
        and all(_near_any(c.candidate.point, roots, 1e-8) for c in ind.certified)
        and len({min(range(4), key=lambda k: distance(c.candidate.point, roots[k])) for c in ind.certified}) == 4
        and secs < 60
    )
    record_criterion(1, "quartics 16 found, 12 rejected, 4 certified", ok, f"{secs:.1f}s")
    assert ok


def test_criterion_2_quartics_root_count():
    q = quartics_fixture()
    full = khovanskii_verify(RootCountInput(q.basis, degree_bound=6))
    cut = khovanskii_verify(RootCountInput([b for b in q.basis if b.level != 2], degree_bound=6))
    dl = d_L(RootCountInput(q.basis, deg_psi=1))
    area = volume(okounkov_body(basis_values(RootCountInput(q.basis))))
    ok = (
        full == VerifiedUpTo(6)
        and isinstance(cut, FailsAt) and cut.level == 2
        and dl == 12
        and area == 6 and math.factorial(2) * area == 12
    )
    record_criterion(2, "quartics Khovanskii check and d_L = 12", ok, f"d_L={dl}, area={area}")
    assert ok


def test_criterion_3_ahs18():
    a = ahs18_fixture()
    inp = RootCountInput(a.basis, deg_psi=a.deg_psi)
    vals = basis_values(inp)
    vol, ind, dl = volume(okounkov_body(vals)), lattice_index(vals), d_L(inp)
    ok = dl == 2 and ind == 1 and vol == Fraction(1, 6) and isinstance(vol, Fraction)
    record_criterion(3, "AHS18 d_L = 2, index 1, volume 1/6", ok, f"d_L={dl}, ind={ind}, vol={vol}")
    assert ok


def _liaison_signature(res):
    def key(cc):
        return tuple(round(complex(x).real, 8) + 1j * round(complex(x).imag, 8) for x in cc.candidate.point)

    return sorted(map(key, res.U), key=str), sorted(map(key, res.T), key=str), len(res.undetermined)


def test_criterion_4_rnc_liaison():
    r = rnc_fixture()
    S = multistart_solve(r.g, SolveConfig(starts=300, seed=1, box_radius=3))
    soft = liaison_classify(2, r.g, r.h, S)
    exact = liaison_classify(2, r.g, r.h, [certify_candidate(r.g, c.to_exact()) for c in S])
    line = [(-1 / 3,) * 3]
    curve = [(-1, 1, -1), (1j, -1, -1j), (-1j, -1, 1j)]
    ok = (
        len(soft.U) == 1 and _close(soft.U[0].candidate.point, line[0], 1e-10)
        and len(soft.T) == 3 and not soft.undetermined
        and all(_near_any(c.candidate.point, curve, 1e-10) for c in soft.T)
        and len({min(range(3), key=lambda k: distance(c.candidate.point, curve[k])) for c in soft.T}) == 3
        and all(c.candidate.exact for c in exact.U + exact.T)
        and _liaison_signature(soft) == _liaison_signature(exact)
    )
    record_criterion(4, "RNC liaison U and T, exact rerun identical", ok)
    assert ok


@pytest.mark.slow
def test_criterion_5_schubert():
    t0 = time.time()
    failures = []
    for m in (2, 3, 4):
        for seed in (1, 2, 3):
            inst = schubert_fixture(m, seed)
            cfg = SolveConfig(starts=2000, seed=seed, box_radius=10)
            S = multistart_solve(inst.g, cfg)
            Sp = multistart_solve(inst.g_prime, cfg)
            ind = alg_ind(inst.f, inst.g, catalan(m) - kostka(m), S, max_reject_steps=20)
            st = alg_set(catalan(m), kostka(m), inst.f, inst.g, inst.g_prime, S, Sp)
            ch = liaison_chain(LiaisonChainSpec(inst.breakpoints, inst.g, inst.h), S)
            chain_ok = len(ch.survivors) == len(ind.certified) and all(
                any(distance(a.candidate.point, b.candidate.point) < 1e-8 for b in ind.certified)
                for a in ch.survivors
            )
            if not (
                len(S) == catalan(m)
                and len(ind.certified) == kostka(m)
                and st.certified and len(st.T) == kostka(m)
                and chain_ok and not ch.undetermined
            ):
                failures.append((m, seed))
    secs = time.time() - t0
    ok = not failures and secs < 300
    record_criterion(5, "Schubert m = 2, 3, 4 over seeds 1..3", ok, f"{secs:.1f}s, failures={failures}")
    assert ok


def test_criterion_6_kostka_table():
    table = [0, 1, 1, 3, 6, 15, 36, 91, 232, 603, 1585, 4213, 11298, 30537]
    got = [kostka(m) for m in range(1, 15)]
    ok = got == table and [catalan(m) for m in (2, 3, 4)] == [2, 5, 14]
    record_criterion(6, "Kostka table m = 1..14", ok)
    assert ok


def test_criterion_7_essential_matrix():
    e = essential_fixture()
    soft = certify_square(e.g, e.E_hat_point)
    hard = certify_square(e.g, e.E_hat_exact)
    c = certify_candidate(e.g, e.E_hat_exact)
    c = refine(e.g, c, 2)
    rep = residual_report(e.exclusion_polys, c)
    ok = (
        soft.certified and soft.alpha_upper < ALPHA_THRESHOLD
        and hard.certified and hard.alpha_upper < Fraction(15767078, 10**8)
        and c.exact and c.certified
        and all(isinstance(v, Fraction) and v > 0 for _, v in rep.per_poly)
    )
    record_criterion(7, "essential matrix certified, exclusion residuals positive", ok,
                     f"alpha={float(hard.alpha_upper):.2e}")
    assert ok


@pytest.mark.slow
def test_criterion_8_property_suites():
    alpha_formula = (13 - 3 * math.sqrt(17)) / 4
    const_ok = ALPHA_THRESHOLD == alpha_formula and f"{ALPHA_THRESHOLD:.10f}" == "0.1576707808"

    gamma_bad = gamma_soundness(trials=200, seed=0)

    rng = np.random.default_rng(8)
    q, g, S = quartics_pipeline()
    fixtures = []
    for c in S:
        rep = residual_report(q.f, c)
        i = max(rep.per_poly, key=lambda t: t[1])[0]
        fixtures.append((q.f.polys[i], c.point, c.rho))
    r = rnc_fixture()
    for c in liaison_classify(2, r.g, r.h, multistart_solve(r.g, SolveConfig(starts=300, seed=1, box_radius=3))).T:
        for p in r.h.polys:
            fixtures.append((p, c.candidate.point, c.candidate.rho))
    e = essential_fixture()
    ce = certify_candidate(e.g, e.E_hat_point)
    for p in e.exclusion_polys.polys[1:]:
        fixtures.append((p.to_float(), ce.point, ce.rho))
    violations = sum(residual_soundness(p, z, rho, rng, samples=10_000) for p, z, rho in fixtures)

    fd = max(jacobian_fd_errors(systems=100, seed=0))
    affine = affine_newton_exact(instances=50, seed=0)

    ok = const_ok and not gamma_bad and violations == 0 and fd <= 1e-6 and affine == 50
    record_criterion(
        8, "property suites", ok,
        f"gamma bad={len(gamma_bad)}, residual violations={violations} over {len(fixtures)} fixtures, "
        f"jacobian fd={fd:.1e}, affine exact={affine}/50",
    )
    assert ok
