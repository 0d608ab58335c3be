"""Certification of solutions to overdetermined systems.

Given ``f`` with ``N >= n`` polynomials and approximate solutions of a square
subsystem ``g``, the algorithms here sort candidates into certified
solutions of ``f``, certified nonsolutions, and undetermined points.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import List, Optional, Sequence, Tuple, Union

from .errors import (
    BudgetExhausted,
    DimensionMismatch,
    InputNotDistinct,
    NotSquare,
    PreconditionFailed,
    RankDeficientMatrix,
)
from .linalg import rref_fraction
from .newton import (
    DEFAULT_BUDGET,
    AlphaCertificate,
    Candidate,
    _dist_sq,
    certify_candidate,
    certify_square,
    distinct,
    refine,
)
from .poly import Polynomial, PolySystem
from .residual import NotRejected, Rejected, TaylorResidualReport, refine_and_reject, residual_report
from .scalar import sqrt_lower


class Label(Enum):
    CertifiedSolutionOfF = "CertifiedSolutionOfF"
    CertifiedNonsolution = "CertifiedNonsolution"
    Undetermined = "Undetermined"


@dataclass(frozen=True)
class ClassifiedCandidate:
    candidate: Candidate
    label: Label
    witness: Optional[Union[int, str]] = None
    report: Optional[TaylorResidualReport] = None
    certificate: Optional[AlphaCertificate] = None


def parallel_map(fn, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving map, optionally over worker processes."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# squaring up -----------------------------------------------------------------

def random_matrix(rows: int, cols: int, seed: int) -> List[List[Fraction]]:
    """Rationals ``p/q`` with ``p, q`` uniform in ``[-999, 999]`` and ``q != 0``."""
    rng = random.Random(seed)

    def entry():
        q = 0
        p = rng.randint(-999, 999)
        while q == 0:
            q = rng.randint(-999, 999)
        return Fraction(p, q)

    return [[entry() for _ in range(cols)] for _ in range(rows)]


def square_up(f: PolySystem, seed: Optional[int] = None,
              A: Optional[Sequence[Sequence]] = None) -> Tuple[PolySystem, List[List[Fraction]]]:
    """``g = A f`` with ``A`` an ``n x N`` matrix of full rank ``n``."""
    n, N = f.nvars, len(f)
    if N < n:
        raise DimensionMismatch(f"cannot square up {N} polynomials in {n} variables")
    if A is None:
        A = random_matrix(n, N, 0 if seed is None else seed)
    A = [list(row) for row in A]
    if len(A) != n or any(len(row) != N for row in A):
        raise DimensionMismatch(f"matrix must be {n} x {N}")
    if len(rref_fraction(A)[1]) < n:
        raise RankDeficientMatrix("squaring-up matrix has rank below n")
    exact = f.exact
    polys = []
    for row in A:
        p = Polynomial(n)
        for a, fj in zip(row, f.polys):
            if a:
                p = p + fj * (a if exact else float(a))
        polys.append(p)
    return PolySystem(polys, f.names), A


# individual certification ------------------------------------------------------

def _check_distinct(S: Sequence[Candidate]) -> None:
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            if not distinct(S[i], S[j]):
                raise InputNotDistinct(f"candidates {i} and {j} are not certifiably distinct")


def _reject_one(f: PolySystem, g: PolySystem, steps: int, c: Candidate):
    if steps > 0:
        return refine_and_reject(f, g, c, steps)
    rep = residual_report(f, c)
    return Rejected(rep, 0, c) if rep.rejected else NotRejected(c)


@dataclass(frozen=True)
class IndResult:
    classified: List[ClassifiedCandidate]
    d: int
    rejected: int

    @property
    def certified(self) -> List[ClassifiedCandidate]:
        return [c for c in self.classified if c.label is Label.CertifiedSolutionOfF]

    @property
    def success(self) -> bool:
        return self.rejected == self.d


def alg_ind(f: PolySystem, g: PolySystem, d: int, S: Sequence[Candidate],
            max_reject_steps: int = 0, jobs: int = 1) -> IndResult:
    """Certify the candidates left over once exactly ``d`` are rejected.

    When the number of rejections differs from ``d`` no candidate is
    certified; rejected ones keep their nonsolution label since each has
    a residual witness.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    S = list(S)
    if any(not c.certified for c in S):
        raise PreconditionFailed("all candidates need a certified radius")
    _check_distinct(S)
    outcomes = parallel_map(partial(_reject_one, f, g, max_reject_steps), S, jobs)
    nrej = sum(isinstance(o, Rejected) for o in outcomes)
    hit = nrej == d
    out = []
    for o in outcomes:
        if isinstance(o, Rejected):
            out.append(ClassifiedCandidate(o.candidate, Label.CertifiedNonsolution, o.report.witness, o.report))
        elif hit:
            out.append(ClassifiedCandidate(o.candidate, Label.CertifiedSolutionOfF, "count"))
        else:
            out.append(ClassifiedCandidate(o.candidate, Label.Undetermined))
    return IndResult(out, d, nrej)


# set certification -------------------------------------------------------------

@dataclass(frozen=True)
class SetResult:
    certified: bool
    T: List[ClassifiedCandidate] = field(default_factory=list)
    reason: str = ""
    refined_prime: List[Candidate] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "Certified" if self.certified else "FAIL"


def separation_gap(S: Sequence[Candidate]):
    """``min_{i<j} ||z_i - z_j|| - (rho_i + rho_j)``; ``None`` for fewer than two points."""
    exact = any(c.exact for c in S)
    best = None
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            a, b = S[i], S[j]
            if exact:
                gap = sqrt_lower(_dist_sq(a.point, b.point, True)) - (Fraction(a.rho) + Fraction(b.rho))
            else:
                gap = math.sqrt(_dist_sq(a.point, b.point, False)) - (float(a.rho) + float(b.rho))
            best = gap if best is None or gap < best else best
    return best


def _balls_meet(c1: Candidate, c2: Candidate) -> bool:
    if c1.exact or c2.exact:
        r = Fraction(c1.rho) + Fraction(c2.rho)
        return r * r > _dist_sq(c1.point, c2.point, True)
    r = float(c1.rho) + float(c2.rho)
    return r * r > _dist_sq(c1.point, c2.point, False)


def _tighten(g: PolySystem, c: Candidate, r, budget: int) -> Candidate:
    """Refine until a full certificate passes with ``2*beta < r/3``."""
    c = certify_candidate(g, c)
    for _ in range(budget + 1):
        if c.certified and (r is None or c.rho < r / 3):
            return c
        c = refine(g, c, 1, recertify=True)
    raise BudgetExhausted("could not shrink a refined ball below r/3")


def alg_set(d: int, e: int, f: PolySystem, g: PolySystem, g_prime: PolySystem,
            S: Sequence[Candidate], S_prime: Sequence[Candidate], budget: int = DEFAULT_BUDGET) -> SetResult:
    """Certify the points of ``V(g)`` whose balls meet solutions of a second subsystem."""
    S, S_prime = list(S), list(S_prime)
    if not 0 <= e <= d:
        return SetResult(False, reason=f"need 0 <= e <= d, got e={e}, d={d}")
    if len(S) != d or len(S_prime) != d:
        return SetResult(False, reason=f"expected {d} candidates per subsystem, got {len(S)} and {len(S_prime)}")
    if any(not c.certified for c in S):
        raise PreconditionFailed("candidates of g need certified radii")
    r = separation_gap(S)
    if r is not None and r <= 0:
        return SetResult(False, reason="balls around the solutions of g are not disjoint")
    refined = [_tighten(g_prime, c, r, budget) for c in S_prime]
    T = []
    for c in S:
        if any(_balls_meet(c, cp) for cp in refined):
            T.append(ClassifiedCandidate(c, Label.CertifiedSolutionOfF, "ball"))
    ok = len(T) == e
    reason = "" if ok else f"{len(T)} balls met, expected {e}"
    return SetResult(ok, T if ok else [], reason, refined)


# liaison -----------------------------------------------------------------------

@dataclass(frozen=True)
class LiaisonResult:
    T: List[ClassifiedCandidate]
    U: List[ClassifiedCandidate]
    undetermined: List[ClassifiedCandidate]


def _split(f: PolySystem, g: PolySystem, c: Candidate, budget: int):
    """``("U", cert)`` if ``c`` certifies on ``f``, ``("T", report)`` if ``f`` is nonzero on its ball."""
    for _ in range(budget + 1):
        cert = certify_square(f, c.point)
        if cert.certified:
            return "U", c, cert
        rep = residual_report(f, c)
        if rep.rejected:
            return "T", c, rep
        c = refine(g, c, 1)
        if c.flag or not c.certified:
            break
    return "?", c, None


def liaison_classify(r: int, g: PolySystem, h: Union[PolySystem, Sequence[Polynomial]],
                     S: Sequence[Candidate], budget: int = DEFAULT_BUDGET) -> LiaisonResult:
    """Split ``V(g)`` along ``V(g_1..g_r) = X u Y`` with ``Y = V(h)``."""
    h = list(h)
    if len(h) != r:
        raise DimensionMismatch(f"expected {r} polynomials in h, got {len(h)}")
    if not g.is_square:
        raise NotSquare("g must be square")
    f = PolySystem(h + list(g.polys[r:]), g.names)
    T, U, und = [], [], []
    for c in S:
        kind, c2, w = _split(f, g, c, budget)
        if kind == "U":
            U.append(ClassifiedCandidate(c2, Label.Undetermined, "alpha", certificate=w))
        elif kind == "T":
            T.append(ClassifiedCandidate(c2, Label.CertifiedSolutionOfF, w.witness, w))
        else:
            und.append(ClassifiedCandidate(c2, Label.Undetermined))
    return LiaisonResult(T, U, und)


@dataclass(frozen=True)
class LiaisonChainSpec:
    breakpoints: Tuple[int, ...]
    g: PolySystem
    h: PolySystem

    def __post_init__(self):
        a = tuple(self.breakpoints)
        n = self.g.nvars
        if a[0] != 0 or a[-1] != n or any(x >= y for x, y in zip(a, a[1:])):
            raise ValueError("breakpoints must increase strictly from 0 to n")
        if len(self.g) != n or len(self.h) != n:
            raise DimensionMismatch("g and h must both have n polynomials")
        object.__setattr__(self, "breakpoints", a)

    def block_system(self, i: int) -> PolySystem:
        lo, hi = self.breakpoints[i - 1], self.breakpoints[i]
        polys = list(self.g.polys[:lo]) + list(self.h.polys[lo:hi]) + list(self.g.polys[hi:])
        return PolySystem(polys, self.g.names)


@dataclass(frozen=True)
class ChainResult:
    survivors: List[ClassifiedCandidate]
    discarded: List[List[ClassifiedCandidate]]
    undetermined: List[ClassifiedCandidate]


def liaison_chain(spec: LiaisonChainSpec, S: Sequence[Candidate], budget: int = DEFAULT_BUDGET) -> ChainResult:
    """Peel the linked components block by block; survivors lie on every ``X_i``."""
    alive = list(S)
    discarded, und = [], []
    last = {}
    for i in range(1, len(spec.breakpoints)):
        f = spec.block_system(i)
        keep, gone = [], []
        for c in alive:
            kind, c2, w = _split(f, spec.g, c, budget)
            if kind == "U":
                gone.append(ClassifiedCandidate(c2, Label.Undetermined, f"block {i}", certificate=w))
            elif kind == "T":
                keep.append(c2)
                last[id(c2)] = w
            else:
                und.append(ClassifiedCandidate(c2, Label.Undetermined, f"block {i}"))
        discarded.append(gone)
        alive = keep
    survivors = [ClassifiedCandidate(c, Label.CertifiedSolutionOfF, "liaison", last.get(id(c))) for c in alive]
    return ChainResult(survivors, discarded, und)
