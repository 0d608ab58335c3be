"""Excess-root counts from a supplied Khovanskii basis.

Elements of the graded algebra ``A_L = sum_k t^k L^k`` are given as
:class:`GradedElement` (a polynomial and its level ``k``).  The valuation is
the exponent of the order-largest monomial.  The basis is verified up to a
degree bound by comparing the value sets of the spaces ``L^k`` with the
semigroup generated by the basis values; the Newton-Okounkov body and the
lattice index then give ``d_L = n! * deg_psi * Vol / ind``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import flint

from .errors import (
    DimensionTooHigh,
    EmptyInput,
    ModeMismatch,
    NonIntegerResult,
    PreconditionFailed,
    RankDeficient,
    ZeroPolynomial,
)
from .poly import GREVLEX, Monomial, MonomialOrder, Polynomial
from .scalar import QI

Point = Tuple[Fraction, ...]


@dataclass(frozen=True)
class GradedElement:
    """``t^level * poly`` in the graded algebra."""

    poly: Polynomial
    level: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("levels start at 1")
        if self.poly.is_zero():
            raise ZeroPolynomial("basis elements must be nonzero")


@dataclass(frozen=True)
class GradedValueSet:
    values: Tuple[Tuple[Monomial, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple((tuple(v), int(k)) for v, k in self.values))
        if any(k < 1 for _, k in self.values):
            raise ValueError("levels start at 1")

    @property
    def nvars(self) -> int:
        if not self.values:
            raise EmptyInput("no values")
        return len(self.values[0][0])

    def points(self) -> List[Point]:
        """The level-one slices ``v / k``, deduplicated, in input order."""
        seen, out = set(), []
        for v, k in self.values:
            p = tuple(Fraction(x, k) for x in v)
            if p not in seen:
                seen.add(p)
                out.append(p)
        return out


@dataclass(frozen=True)
class VerifiedUpTo:
    degree: int


@dataclass(frozen=True)
class FailsAt:
    level: int
    exponent: Monomial
    missing: Tuple[Monomial, ...] = ()


@dataclass
class RootCountInput:
    basis: List[GradedElement]
    order: MonomialOrder = GREVLEX
    deg_psi: int = 1
    degree_bound: Optional[int] = None

    def __post_init__(self):
        if not self.basis:
            raise EmptyInput("empty Khovanskii basis")
        if self.deg_psi < 1:
            raise ValueError("deg_psi must be positive")
        if not any(b.level == 1 for b in self.basis):
            raise EmptyInput("the basis has no level-one elements spanning L")

    @property
    def nvars(self) -> int:
        return self.basis[0].poly.nvars

    @property
    def bound(self) -> int:
        if self.degree_bound is not None:
            return self.degree_bound
        return 2 * max(b.level for b in self.basis)

    def level(self, k: int) -> List[Polynomial]:
        return [b.poly for b in self.basis if b.level == k]


# valuation -------------------------------------------------------------------

def lead_valuation(p: Polynomial, order: MonomialOrder = GREVLEX) -> Monomial:
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no valuation")
    return order.max(p.terms)


# exact echelon forms ---------------------------------------------------------

def _integer_rows(polys: Sequence[Polynomial]) -> Optional[List[Dict[Monomial, int]]]:
    """Primitive integer rows, or ``None`` if some coefficient is not real."""
    rows = []
    for p in polys:
        if p.exact is False:
            raise ModeMismatch("exact coefficients are required for row reduction")
        if any(c.im for c in p.terms.values()):
            return None
        den = reduce(math.lcm, (c.re.denominator for c in p.terms.values()), 1)
        row = {e: int(c.re * den) for e, c in p.terms.items()}
        if row:
            rows.append(_primitive(row))
    return rows


def _primitive(row: Dict[Monomial, int]) -> Dict[Monomial, int]:
    g = math.gcd(*row.values())
    return {e: c // g for e, c in row.items()} if g > 1 else row


def _mul_int(a: Dict[Monomial, int], b: Dict[Monomial, int]) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _echelon_int(rows: List[Dict[Monomial, int]], order: MonomialOrder) -> List[Dict[Monomial, int]]:
    rows = [r for r in rows if r]
    if not rows:
        return []
    monos = order.sorted({e for r in rows for e in r})
    idx = {e: j for j, e in enumerate(monos)}
    dense = [[0] * len(monos) for _ in rows]
    for i, r in enumerate(rows):
        for e, c in r.items():
            dense[i][idx[e]] = c
    R, _, rank = flint.fmpz_mat(dense).rref()
    out = []
    for i in range(rank):
        row = {}
        for j in range(len(monos)):
            v = R[i, j]
            if v != 0:
                row[monos[j]] = int(v)
        out.append(_primitive(row))
    return out


def _echelon_exact(polys: Sequence[Polynomial], order: MonomialOrder) -> List[Dict[Monomial, QI]]:
    """Echelon basis over the Gaussian rationals with distinct lead monomials."""
    pivots: Dict[Monomial, Dict[Monomial, QI]] = {}
    for p in polys:
        if p.exact is False:
            raise ModeMismatch("exact coefficients are required for row reduction")
        r = dict(p.terms)
        while r:
            lead = order.max(r)
            piv = pivots.get(lead)
            if piv is None:
                inv = 1 / r[lead]
                pivots[lead] = {e: c * inv for e, c in r.items()}
                break
            f = r[lead]
            for e, c in piv.items():
                v = r.get(e, QI(0)) - f * c
                if v:
                    r[e] = v
                else:
                    r.pop(e, None)
    return [pivots[e] for e in order.sorted(pivots)]


def _lead_set(rows, order: MonomialOrder) -> Set[Monomial]:
    return {order.max(r) for r in rows}


def value_spaces(L: Sequence[Polynomial], k: int, order: MonomialOrder = GREVLEX,
                 backend: str = "auto") -> List[Set[Monomial]]:
    """``[nu(L^1), ..., nu(L^k)]`` computed by exact row reduction.

    ``backend`` is ``"auto"`` (integer fast path when all coefficients are
    real), ``"flint"`` or ``"python"`` (plain Gaussian-rational elimination).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    L = [p for p in L if not p.is_zero()]
    if not L:
        raise EmptyInput("L spans the zero space")
    rows = _integer_rows(L) if backend != "python" else None
    if backend == "flint" and rows is None:
        raise ModeMismatch("the flint backend needs real rational coefficients")
    out = []
    if rows is not None:
        base = _echelon_int(rows, order)
        cur = base
        out.append(_lead_set(cur, order))
        for _ in range(2, k + 1):
            cur = _echelon_int([_mul_int(a, b) for a in cur for b in base], order)
            out.append(_lead_set(cur, order))
        return out
    n = L[0].nvars
    base = [Polynomial(n, r) for r in _echelon_exact(L, order)]
    cur = base
    out.append({lead_valuation(p, order) for p in cur})
    for _ in range(2, k + 1):
        cur = [Polynomial(n, r) for r in _echelon_exact([a * b for a in cur for b in base], order)]
        out.append({lead_valuation(p, order) for p in cur})
    return out


def value_space(L: Sequence[Polynomial], k: int, order: MonomialOrder = GREVLEX,
                backend: str = "auto") -> Set[Monomial]:
    """The value set ``nu(L^k)`` of the span of ``k``-fold products."""
    return value_spaces(L, k, order, backend)[-1]


# semigroup -------------------------------------------------------------------

def basis_values(inp: RootCountInput) -> GradedValueSet:
    """Values of the basis, one per echelon element of each level's span."""
    vals = []
    for k in sorted({b.level for b in inp.basis}):
        polys = inp.level(k)
        rows = _integer_rows(polys)
        leads = _lead_set(_echelon_int(rows, inp.order), inp.order) if rows is not None \
            else _lead_set(_echelon_exact(polys, inp.order), inp.order)
        vals.extend((v, k) for v in inp.order.sorted(leads))
    return GradedValueSet(tuple(vals))


def generated_semigroup(values: GradedValueSet, D: int) -> List[Set[Monomial]]:
    """Levels ``0..D`` of the semigroup generated by ``values``."""
    n = values.nvars
    G: List[Set[Monomial]] = [{(0,) * n}] + [set() for _ in range(D)]
    for k in range(1, D + 1):
        for v, lv in values.values:
            if lv <= k:
                for w in G[k - lv]:
                    G[k].add(tuple(a + b for a, b in zip(v, w)))
    return G


def khovanskii_verify(inp: RootCountInput, backend: str = "auto") -> Union[VerifiedUpTo, FailsAt]:
    """Check ``nu(L^k)`` lies in the generated semigroup for ``k <= D``."""
    D = inp.bound
    vals = basis_values(inp)
    G = generated_semigroup(vals, D)
    spaces = value_spaces(inp.level(1), D, inp.order, backend)
    for k, vs in enumerate(spaces, start=1):
        missing = vs - G[k]
        if missing:
            ordered = tuple(inp.order.sorted(missing, descending=False))
            return FailsAt(k, ordered[0], ordered)
    return VerifiedUpTo(D)


# convex hulls ----------------------------------------------------------------

@dataclass(frozen=True)
class OkounkovBody:
    """Exact convex body; ``facets`` list cyclically ordered vertex indices (3-D only)."""

    vertices: Tuple[Point, ...]
    nvars: int
    dimension: int
    facets: Tuple[Tuple[int, ...], ...] = ()


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _affine_rank(pts: Sequence[Point]) -> int:
    if len(pts) <= 1:
        return 0
    rows = [list(_sub(p, pts[0])) for p in pts[1:]]
    rank, ncol = 0, len(pts[0])
    for col in range(ncol):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _hull_2d(pts: Sequence[Tuple]) -> List[int]:
    """Indices of the strict convex hull in counter-clockwise order (monotone chain)."""
    order = sorted(range(len(pts)), key=lambda i: pts[i])

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def chain(idx):
        h: List[int] = []
        for i in idx:
            while len(h) >= 2 and turn(pts[h[-2]], pts[h[-1]], pts[i]) <= 0:
                h.pop()
            h.append(i)
        return h

    lower, upper = chain(order), chain(reversed(order))
    return lower[:-1] + upper[:-1]


def _segment_ends(pts: Sequence[Point]) -> List[int]:
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    return [order[0], order[-1]] if pts[order[0]] != pts[order[-1]] else [order[0]]


def _planar_hull(pts: Sequence[Point], normal) -> List[int]:
    # drop the coordinate where the normal is largest so projection is injective
    drop = max(range(3), key=lambda j: abs(normal[j]))
    keep = [j for j in range(3) if j != drop]
    proj = [tuple(p[j] for j in keep) for p in pts]
    return _hull_2d(proj)


def okounkov_body(values: Union[GradedValueSet, Iterable[Tuple[Monomial, int]]]) -> OkounkovBody:
    """Exact convex hull of the slices ``v / k`` (``n <= 3``)."""
    if not isinstance(values, GradedValueSet):
        values = GradedValueSet(tuple(values))
    if not values.values:
        raise EmptyInput("no values")
    n = values.nvars
    if n > 3:
        raise DimensionTooHigh(f"exact hulls are implemented for n <= 3, got {n}")
    pts = values.points()
    dim = _affine_rank(pts)
    if dim == 0:
        return OkounkovBody((pts[0],), n, 0)
    if dim == 1:
        return OkounkovBody(tuple(pts[i] for i in _segment_ends(pts)), n, 1)
    if n == 2:
        return OkounkovBody(tuple(pts[i] for i in _hull_2d(pts)), n, 2)
    if dim == 2:
        a = pts[0]
        normal = next(
            nv for b, c in combinations(pts[1:], 2)
            if any(nv := _cross(_sub(b, a), _sub(c, a)))
        )
        return OkounkovBody(tuple(pts[i] for i in _planar_hull(pts, normal)), n, 2)
    # full-dimensional in 3-D: supporting planes through point triples
    facets: Dict[Tuple, Tuple[int, ...]] = {}
    for i, j, k in combinations(range(len(pts)), 3):
        nv = _cross(_sub(pts[j], pts[i]), _sub(pts[k], pts[i]))
        if not any(nv):
            continue
        off = _dot(nv, pts[i])
        side = [_dot(nv, p) - off for p in pts]
        if all(s <= 0 for s in side):
            pass
        elif all(s >= 0 for s in side):
            nv, off = tuple(-x for x in nv), -off
        else:
            continue
        on = [m for m, s in enumerate(side) if s == 0]
        key = tuple(on)
        if key in facets:
            continue
        ring = _planar_hull([pts[m] for m in on], nv)
        facets[key] = tuple(on[m] for m in ring)
    used = sorted({m for f in facets.values() for m in f})
    remap = {m: r for r, m in enumerate(used)}
    verts = tuple(pts[m] for m in used)
    return OkounkovBody(verts, n, 3, tuple(tuple(remap[m] for m in f) for f in facets.values()))


def volume(body: OkounkovBody) -> Fraction:
    """Exact Euclidean volume; bodies of lower dimension have volume 0."""
    if body.dimension < body.nvars:
        return Fraction(0)
    V = body.vertices
    if body.nvars == 1:
        return abs(V[1][0] - V[0][0])
    if body.nvars == 2:
        s = sum(V[i][0] * V[(i + 1) % len(V)][1] - V[(i + 1) % len(V)][0] * V[i][1] for i in range(len(V)))
        return abs(Fraction(s)) / 2
    c = tuple(sum(v[j] for v in V) / len(V) for j in range(3))
    total = Fraction(0)
    for f in body.facets:
        a = _sub(V[f[0]], c)
        for b, d in zip(f[1:-1], f[2:]):
            total += abs(_dot(a, _cross(_sub(V[b], c), _sub(V[d], c))))
    return total / 6


# lattice index ---------------------------------------------------------------

def lattice_index(values: Union[GradedValueSet, Iterable[Tuple[Monomial, int]]]) -> int:
    """Index in ``Z^n`` of the level-zero part of the group generated by the values."""
    if not isinstance(values, GradedValueSet):
        values = GradedValueSet(tuple(values))
    n = values.nvars
    rows = [[k] + list(v) for v, k in values.values]
    H = flint.fmpz_mat(rows).hnf()
    # HNF with the level column first: rows after the first have level zero
    level0 = [[int(H[i, j]) for j in range(1, n + 1)] for i in range(1, H.nrows())]
    level0 = [r for r in level0 if any(r)]
    if len(level0) < n:
        raise RankDeficient("the level-zero lattice has rank below n")
    return abs(int(flint.fmpz_mat(level0[:n]).det()))


# the count -------------------------------------------------------------------

@dataclass(frozen=True)
class RootCountReport:
    verification: Union[VerifiedUpTo, FailsAt]
    values: GradedValueSet
    body: OkounkovBody
    volume: Fraction
    index: int
    deg_psi: int
    d_L: int


def root_count(inp: RootCountInput, bezout: Optional[int] = None, verify: bool = True,
               backend: str = "auto") -> RootCountReport:
    """All intermediate quantities of the count ``n! * deg_psi * Vol / ind``."""
    check = khovanskii_verify(inp, backend) if verify else VerifiedUpTo(0)
    if isinstance(check, FailsAt):
        raise PreconditionFailed(f"basis is not Khovanskii at level {check.level}: {check.exponent} missing")
    vals = basis_values(inp)
    body = okounkov_body(vals)
    vol = volume(body)
    ind = lattice_index(vals)
    n = inp.nvars
    base = math.factorial(n) * vol / ind
    if bezout is not None and base > bezout:
        raise PreconditionFailed(f"n!*Vol/ind = {base} exceeds the Bezout bound {bezout}")
    d = base * inp.deg_psi
    if d.denominator != 1 or d <= 0:
        raise NonIntegerResult(f"d_L = {d} is not a positive integer")
    return RootCountReport(check, vals, body, vol, ind, inp.deg_psi, int(d))


def d_L(inp: RootCountInput, bezout: Optional[int] = None, verify: bool = True) -> int:
    return root_count(inp, bezout, verify).d_L
