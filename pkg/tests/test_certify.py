from __future__ import annotations

from fractions import Fraction

import pytest

from overcert.certify import (
    Label,
    LiaisonChainSpec,
    alg_ind,
    alg_set,
    liaison_chain,
    liaison_classify,
    random_matrix,
    separation_gap,
    square_up,
)
from overcert.errors import DimensionMismatch, InputNotDistinct, PreconditionFailed, RankDeficientMatrix
from overcert.fixtures import quartics_fixture, rnc_fixture, schubert_fixture
from overcert.newton import Candidate, certify_candidate, certify_square, distance
from overcert.poly import Polynomial, PolySystem, eval_poly
from overcert.scalar import QI
from overcert.solver import SolveConfig, multistart_solve

QUARTIC_ROOTS = [(4, 4), (-3, -1), (-1, -1), (3, 3)]


def near_root(c, roots, tol=1e-8):
    return any(max(abs(complex(x) - r) for x, r in zip(c.point, root)) < tol for root in roots)


class TestSquareUp:
    def test_identity_block_selects_subsystem(self):
        q = quartics_fixture()
        A = [[1 if j == i else 0 for j in range(11)] for i in range(2)]
        g, _ = square_up(q.f, A=A)
        assert g.polys == q.f.polys[:2]

    def test_seeded_quartics(self):
        q = quartics_fixture()
        g, A = square_up(q.f, seed=42)
        assert g.degrees == (4, 4) and len(A) == 2 and len(A[0]) == 11
        assert square_up(q.f, seed=42)[0].polys == g.polys

    def test_common_zeros_survive(self):
        q = quartics_fixture()
        g, _ = square_up(q.f, seed=7)
        for pt in q.solutions:
            assert g(pt) == [0, 0]

    def test_rank_deficient(self):
        q = quartics_fixture()
        with pytest.raises(RankDeficientMatrix):
            square_up(q.f, A=[[1] * 11, [2] * 11])

    def test_underdetermined(self):
        f = PolySystem([Polynomial.parse("z1", ("z1", "z2"))])
        with pytest.raises(DimensionMismatch):
            square_up(f, seed=1)

    def test_matrix_entries(self):
        A = random_matrix(3, 4, seed=5)
        assert all(isinstance(a, Fraction) and abs(a.numerator) <= 999 for row in A for a in row)
        assert A == random_matrix(3, 4, seed=5)


class TestAlgInd:
    def test_quartics(self, quartics):
        q, g, S = quartics
        res = alg_ind(q.f, g, 12, S)
        assert res.rejected == 12 and res.success
        assert len(res.certified) == 4
        assert all(near_root(c.candidate, QUARTIC_ROOTS) for c in res.certified)
        for cc in res.classified:
            if cc.label is Label.CertifiedNonsolution:
                assert cc.report.rejected and cc.witness is not None

    def test_labels_match_exact_membership(self, quartics):
        # the four rational points are the only common zeros
        q, g, S = quartics
        res = alg_ind(q.f, g, 12, S)
        for cc in res.classified:
            on_f = near_root(cc.candidate, QUARTIC_ROOTS, 1e-6)
            assert (cc.label is Label.CertifiedSolutionOfF) == on_f
        for pt in q.solutions:
            assert all(v == 0 for v in q.f(pt))

    def test_d_zero_no_rejections(self):
        g = PolySystem([Polynomial.parse("z^2 - 1", ("z",))], ("z",))
        S = [certify_candidate(g, (1.001,)), certify_candidate(g, (-1.001,))]
        res = alg_ind(g, g, 0, S)
        assert [c.label for c in res.classified] == [Label.CertifiedSolutionOfF] * 2

    def test_d_too_large_gives_empty_output(self, quartics):
        q, g, S = quartics
        res = alg_ind(q.f, g, 13, S)
        assert res.certified == [] and not res.success
        labels = {c.label for c in res.classified}
        assert Label.CertifiedSolutionOfF not in labels

    def test_rejects_duplicates(self):
        g = PolySystem([Polynomial.parse("z^2 - 1", ("z",))], ("z",))
        c = certify_candidate(g, (1.001,))
        with pytest.raises(InputNotDistinct):
            alg_ind(g, g, 0, [c, c])

    def test_needs_certified(self):
        g = PolySystem([Polynomial.parse("z^2 - 1", ("z",))], ("z",))
        with pytest.raises(PreconditionFailed):
            alg_ind(g, g, 0, [Candidate((1.0,))])

    def test_parallel_matches_serial(self, quartics):
        q, g, S = quartics
        a = alg_ind(q.f, g, 12, S)
        b = alg_ind(q.f, g, 12, S, jobs=2)
        assert [c.label for c in a.classified] == [c.label for c in b.classified]

    def test_reject_steps(self, quartics):
        q, g, S = quartics
        res = alg_ind(q.f, g, 12, S, max_reject_steps=5)
        assert res.rejected == 12


class TestAlgSet:
    G = PolySystem([Polynomial.parse("z^2 - 1", ("z",))], ("z",))

    def _S(self, g, pts):
        return [certify_candidate(g, (p,)) for p in pts]

    def test_self_intersection(self):
        S = self._S(self.G, [1.0001, -1.0001])
        assert alg_set(2, 2, self.G, self.G, self.G, S, S).certified
        res = alg_set(2, 1, self.G, self.G, self.G, S, S)
        assert not res.certified and res.verdict == "FAIL"

    def test_disjoint_subsystems(self):
        gp = PolySystem([Polynomial.parse("z^2 - 4", ("z",))], ("z",))
        f = PolySystem(list(self.G.polys) + list(gp.polys), ("z",))
        res = alg_set(2, 0, f, self.G, gp, self._S(self.G, [1.0001, -1.0001]), self._S(gp, [2.0001, -2.0001]))
        assert res.certified and res.T == []

    def test_partial_overlap(self):
        gp = PolySystem([Polynomial.parse("(z - 1)*(z - 3)", ("z",))], ("z",))
        f = PolySystem(list(self.G.polys) + list(gp.polys), ("z",))
        res = alg_set(2, 1, f, self.G, gp, self._S(self.G, [1.0001, -1.0001]), self._S(gp, [0.9999, 3.0001]))
        assert res.certified and len(res.T) == 1
        assert abs(res.T[0].candidate.point[0] - 1) < 1e-3

    def test_count_mismatch(self):
        S = self._S(self.G, [1.0001, -1.0001])
        res = alg_set(3, 1, self.G, self.G, self.G, S, S)
        assert not res.certified and "expected 3" in res.reason

    def test_e_larger_than_d(self):
        S = self._S(self.G, [1.0001, -1.0001])
        assert not alg_set(2, 3, self.G, self.G, self.G, S, S).certified

    def test_separation_gap(self):
        S = self._S(self.G, [1.0001, -1.0001])
        assert separation_gap(S) > 1.9
        assert separation_gap(S[:1]) is None

    def test_schubert_cross_check(self):
        inst = schubert_fixture(2, 1)
        cfg = SolveConfig(starts=500, seed=1)
        S, Sp = multistart_solve(inst.g, cfg), multistart_solve(inst.g_prime, cfg)
        res = alg_set(2, 1, inst.f, inst.g, inst.g_prime, S, Sp)
        assert res.certified and len(res.T) == 1
        z = res.T[0].candidate.point
        assert certify_square(inst.g, z).certified
        assert min(distance(z, c.point) for c in res.refined_prime) < 1e-6


class TestLiaison:
    def _solve(self, r):
        return multistart_solve(r.g, SolveConfig(starts=300, seed=1, box_radius=3))

    def test_rnc(self):
        r = rnc_fixture()
        S = self._solve(r)
        res = liaison_classify(2, r.g, r.h, S)
        assert len(res.U) == 1 and len(res.T) == 3 and not res.undetermined
        assert all(abs(complex(x) + 1 / 3) < 1e-10 for x in res.U[0].candidate.point)
        for cc in res.T:
            assert near_root(cc.candidate, [tuple(complex(x) for x in p) for p in r.curve_solutions], 1e-10)

    def test_partition(self):
        r = rnc_fixture()
        S = self._solve(r)
        res = liaison_classify(2, r.g, r.h, S)
        assert len(res.T) + len(res.U) + len(res.undetermined) == len(S)
        tpts = {tuple(c.candidate.point) for c in res.T}
        assert not tpts & {tuple(c.candidate.point) for c in res.U}

    def test_h_equal_to_g_prefix_sends_all_to_u(self):
        r = rnc_fixture()
        S = self._solve(r)
        res = liaison_classify(2, r.g, r.g.polys[:2], S)
        assert len(res.U) == len(S)

    def test_exact_mode_same_verdicts(self):
        r = rnc_fixture()
        S = [certify_candidate(r.g, c.to_exact()) for c in self._solve(r)]
        res = liaison_classify(2, r.g, r.h, S)
        assert len(res.U) == 1 and len(res.T) == 3 and not res.undetermined
        assert res.U[0].candidate.exact
        assert all(abs(complex(x - QI(Fraction(-1, 3)))) < 1e-10 for x in res.U[0].candidate.point)

    def test_wrong_length_h(self):
        r = rnc_fixture()
        with pytest.raises(DimensionMismatch):
            liaison_classify(1, r.g, r.h, [])

    def test_single_block_chain_matches_classify(self):
        r = rnc_fixture()
        S = self._solve(r)
        h = PolySystem(list(r.h.polys) + [r.g.polys[2]], r.g.names)
        ch = liaison_chain(LiaisonChainSpec((0, 3), r.g, h), S)
        lc = liaison_classify(2, r.g, r.h, S)
        assert sorted(map(str, (c.candidate.point for c in ch.survivors))) == \
            sorted(map(str, (c.candidate.point for c in lc.T)))

    def test_breakpoints_validated(self):
        r = rnc_fixture()
        with pytest.raises(ValueError):
            LiaisonChainSpec((0, 2, 2, 3), r.g, r.g)

    def test_schubert_chain_agrees_with_ind(self):
        inst = schubert_fixture(2, 2)
        S = multistart_solve(inst.g, SolveConfig(starts=500, seed=2))
        ch = liaison_chain(LiaisonChainSpec(inst.breakpoints, inst.g, inst.h), S)
        ind = alg_ind(inst.f, inst.g, inst.d, S, max_reject_steps=20)
        assert len(ch.survivors) == len(ind.certified) == 1
        assert distance(ch.survivors[0].candidate.point, ind.certified[0].candidate.point) < 1e-8
