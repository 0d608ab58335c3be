"""Exact builders for the worked examples.

Every fixture uses integer or small-rational coefficients.  Randomized
fixtures draw from ``random.Random(seed)``, so they are reproducible across
runs and platforms.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import DegenerateData
from .linalg import det_fraction, nullspace_fraction, rref_fraction
from .poly import Polynomial, PolySystem
from .rootcount import GradedElement
from .scalar import QI

# quartics through four points ------------------------------------------------

QUARTICS = (
    "z1*z2 - z2^2 + z1 - z2",
    "z1^2 - z2^2 + 4*z1 - 4*z2",
    "z2^3 - 6*z2^2 + 5*z2 + 12",
    "z1*z2^2 - 6*z2^2 - z1 + 6*z2 + 12",
    "z1^2*z2 - 6*z2^2 - 4*z1 + 9*z2 + 12",
    "z1^3 - 6*z2^2 - 13*z1 + 18*z2 + 12",
    "z2^4 - 31*z2^2 + 42*z2 + 72",
    "z1*z2^3 - 31*z2^2 + z1 + 41*z2 + 72",
    "z1^2*z2^2 - 31*z2^2 + 4*z1 + 38*z2 + 72",
    "z1^3*z2 - 31*z2^2 + 13*z1 + 29*z2 + 72",
    "z1^4 - 31*z2^2 + 40*z1 + 2*z2 + 72",
)
QUARTICS_G = (
    "z1*z2^3 - z2^4 + 10*z1^2*z2 - 26*z1*z2^2 + 16*z2^3 + 10*z1^2 - 15*z1*z2"
    " + 5*z2^2 + 12*z1 - 12*z2"
)
QUARTICS_H = (
    "10*z1^4*z2 - 49*z1^3*z2^2 + 89*z1^2*z2^3 - 71*z1*z2^4 + 21*z2^5 + 10*z1^4"
    " - 18*z1^3*z2 - 18*z1^2*z2^2 + 50*z1*z2^3 - 24*z2^4 + 31*z1^3 - 83*z1^2*z2"
    " + 73*z1*z2^2 - 21*z2^3 + 24*z1^2 - 48*z1*z2 + 24*z2^2"
)
QUARTICS_POINTS = ((4, 4), (-3, -1), (-1, -1), (3, 3))


class QuarticsFixture(NamedTuple):
    f: PolySystem
    basis: List[GradedElement]
    solutions: List[Tuple[QI, QI]]


def quartics_fixture() -> QuarticsFixture:
    names = ("z1", "z2")
    f = PolySystem([Polynomial.parse(s, names) for s in QUARTICS], names)
    g = Polynomial.parse(QUARTICS_G, names)
    h = Polynomial.parse(QUARTICS_H, names)
    basis = [GradedElement(p, 1) for p in f] + [GradedElement(g, 2), GradedElement(h, 3)]
    sols = [tuple(QI(x) for x in pt) for pt in QUARTICS_POINTS]
    return QuarticsFixture(f, basis, sols)


# a small example with a singular square subsystem ----------------------------

class AHSFixture(NamedTuple):
    f: PolySystem
    basis: List[GradedElement]
    deg_psi: int


def ahs18_fixture() -> AHSFixture:
    names = ("z1", "z2", "z3")
    f = PolySystem(
        [
            Polynomial.parse(s, names)
            for s in ("z1^2 + z2^2 - 1", "-16*z2^2 + 8*z1 + 17", "-z2^2 + z1 - z3 - 1", "64*z1*z2 + 16*z2")
        ],
        names,
    )
    f1, f2, f3, f4 = f.polys
    q = 64 * f1 * f2 - 21 * f2 ** 2 - 512 * f1 * f3 + 768 * f2 * f3 - 6400 * f3 ** 2 + Fraction(1, 8) * f4 ** 2
    basis = [GradedElement(p, 1) for p in f] + [GradedElement(q, 2)]
    return AHSFixture(f, basis, 2)


# rational normal curve and a secant line ---------------------------------------

class RNCFixture(NamedTuple):
    g: PolySystem
    h: PolySystem
    line_solutions: List[tuple]
    curve_solutions: List[tuple]


def rnc_fixture() -> RNCFixture:
    names = ("x", "y", "z")
    g = PolySystem([Polynomial.parse(s, names) for s in ("z - y + x^2 - x*y", "x*z - y^2", "x + y + z + 1")], names)
    h = PolySystem([Polynomial.parse(s, names) for s in ("x - y", "x - z")], names)
    third = QI(Fraction(-1, 3))
    line = [(third, third, third)]
    curve = [(QI(-1), QI(1), QI(-1)), (QI(0, 1), QI(-1), QI(0, -1)), (QI(0, -1), QI(-1), QI(0, 1))]
    return RNCFixture(g, h, line, curve)


# Schubert problem: 2-planes meeting m general (m-1)-planes in C^(m+2) --------------

def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("m must be non-negative")
    return math.comb(2 * m, m) // (m + 1)


@lru_cache(maxsize=None)
def _kappa(m: int, j: int) -> int:
    if j > m or j < 0:
        return 0
    if m == 1:
        return 1 if j == 1 else 0
    if j == 0:
        return _kappa(m - 1, 1)
    return _kappa(m - 1, j - 1) + _kappa(m - 1, j) + _kappa(m - 1, j + 1)


def kostka(m: int) -> int:
    """Number of 2-planes meeting ``m`` general codimension-3 planes in ``C^(m+2)``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return _kappa(m, 0)


Matrix = List[List[Fraction]]


@dataclass(frozen=True)
class SchubertInstance:
    m: int
    seed: int
    K: Tuple[Matrix, ...]
    L_vectors: Tuple[Tuple[Fraction, ...], ...]
    L_vectors_prime: Tuple[Tuple[Fraction, ...], ...]
    lambdas: Tuple[Tuple[Fraction, ...], ...]
    f: PolySystem
    g: PolySystem
    g_prime: PolySystem
    h: PolySystem
    d: int
    e: int

    @property
    def n(self) -> int:
        return self.m + 2

    @property
    def breakpoints(self) -> Tuple[int, ...]:
        return tuple(range(0, 2 * self.m + 1, 2))


def _schubert_vars(m: int):
    names = tuple(f"z{c + 1}{i + 1}" for c in range(2) for i in range(m))
    nv = 2 * m

    def var(c, i):
        return Polynomial.variable(nv, c * m + i)

    # H = (Z | I2)^T, an n x 2 matrix of polynomials
    H = [[var(0, i), var(1, i)] for i in range(m)]
    H += [[Polynomial.constant(nv, 1), Polynomial.constant(nv, 0)],
          [Polynomial.constant(nv, 0), Polynomial.constant(nv, 1)]]
    return names, H


def det_with_h(H, M: Sequence[Sequence[Fraction]], rows: Sequence[int]) -> Polynomial:
    """``det [H | M]`` restricted to ``rows``, by Laplace expansion along the H columns."""
    rows = list(rows)
    if len(rows) != 2 + len(M[0]):
        raise ValueError("restricted matrix is not square")
    total = None
    for p1, p2 in combinations(range(len(rows)), 2):
        r1, r2 = rows[p1], rows[p2]
        rest = [list(M[r]) for r in rows if r not in (r1, r2)]
        c = det_fraction(rest)
        if not c:
            continue
        minor = H[r1][0] * H[r2][1] - H[r1][1] * H[r2][0]
        term = minor * (c if (p1 + p2) % 2 == 1 else -c)
        total = term if total is None else total + term
    nv = H[0][0].nvars
    return total if total is not None else Polynomial(nv)


def _rank(A) -> int:
    return len(rref_fraction(A)[1])


def _draw(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def schubert_fixture(m: int, seed: int = 1) -> SchubertInstance:
    """Random rational instance; redraws up to 10 times on degenerate data."""
    if m < 2:
        raise ValueError("m must be at least 2")
    n = m + 2
    rng = random.Random(seed)
    names, H = _schubert_vars(m)
    for _ in range(10):
        try:
            return _schubert_attempt(m, seed, n, rng, names, H)
        except DegenerateData:
            continue
    raise DegenerateData(f"no nondegenerate Schubert data for m={m}, seed={seed}")


def _schubert_attempt(m, seed, n, rng, names, H) -> SchubertInstance:
    K = tuple([[_draw(rng) for _ in range(m - 1)] for _ in range(n)] for _ in range(m))
    ells = tuple(tuple(_draw(rng) for _ in range(n)) for _ in range(2 * m))
    ells_p = tuple(tuple(_draw(rng) for _ in range(n)) for _ in range(2 * m))
    f_polys, g_polys, gp_polys, h_polys, lambdas = [], [], [], [], []
    for k in range(m):
        Kk = K[k]
        for vecs in (ells[2 * k:2 * k + 2], ells_p[2 * k:2 * k + 2]):
            span = [list(col) for col in zip(*Kk)] + [list(v) for v in vecs]
            if _rank(span) != m + 1:
                raise DegenerateData("appended columns do not span a hyperplane")
        for j in range(n):
            f_polys.append(det_with_h(H, Kk, [r for r in range(n) if r != j]))
        for vecs, out in ((ells[2 * k:2 * k + 2], g_polys), (ells_p[2 * k:2 * k + 2], gp_polys)):
            for v in vecs:
                Lki = [row + [v[r]] for r, row in enumerate(Kk)]
                out.append(det_with_h(H, Lki, range(n)))
        span = [list(col) for col in zip(*Kk)] + [list(v) for v in ells[2 * k:2 * k + 2]]
        ker = nullspace_fraction(span)
        if len(ker) != 1:
            raise DegenerateData("hyperplane is not unique")
        lam = ker[0]
        lambdas.append(tuple(lam))
        for c in range(2):
            h = None
            for r in range(n):
                if lam[r]:
                    t = H[r][c] * lam[r]
                    h = t if h is None else h + t
            if h is None or h.degree < 1:
                raise DegenerateData("linear form does not depend on the plane")
            h_polys.append(h)
    if any(p.degree != 2 for p in g_polys + gp_polys):
        raise DegenerateData("a determinant dropped degree")
    C, e = catalan(m), kostka(m)
    return SchubertInstance(
        m=m,
        seed=seed,
        K=K,
        L_vectors=ells,
        L_vectors_prime=ells_p,
        lambdas=tuple(lambdas),
        f=PolySystem(f_polys, names),
        g=PolySystem(g_polys, names),
        g_prime=PolySystem(gp_polys, names),
        h=PolySystem(h_polys, names),
        d=C - e,
        e=e,
    )


# five-point relative pose ----------------------------------------------------

ESSENTIAL_X = (
    ("0", "0", "1"),
    ("0", "1", "1"),
    (".750733", ".393279", "1"),
    (".383872", ".210436", "1"),
    (".970556", ".699694", "1"),
)
ESSENTIAL_Y = (
    ("0", "0", "1"),
    ("0", "1", "1"),
    (".355041", ".153766", "1"),
    (".090869", ".143374", "1"),
    (".003463", ".17189", "1"),
)
E_HAT = (
    ("1", "-2.36148", "-.017451"),
    ("2.52018", ".979523", "-.066457"),
    (".117939", "-.913067", "-.000001"),
)
ESSENTIAL_NAMES = ("e12", "e13", "e21", "e22", "e23", "e31", "e32", "e33")


@dataclass(frozen=True)
class EssentialInstance:
    x: Tuple[Tuple[Fraction, ...], ...]
    y: Tuple[Tuple[Fraction, ...], ...]
    g: PolySystem
    exclusion_polys: PolySystem
    E_hat: np.ndarray
    E_hat_exact: Tuple[QI, ...]

    @property
    def E_hat_point(self) -> Tuple[complex, ...]:
        return tuple(complex(v) for v in self.E_hat.ravel()[1:])


def essential_matrix_polys() -> List[List[Polynomial]]:
    """The 3x3 matrix of chart coordinates with ``e11 = 1``."""
    nv = len(ESSENTIAL_NAMES)
    E = [[None] * 3 for _ in range(3)]
    E[0][0] = Polynomial.constant(nv, 1)
    k = 0
    for i in range(3):
        for j in range(3):
            if (i, j) != (0, 0):
                E[i][j] = Polynomial.variable(nv, k)
                k += 1
    return E


def demazure_row(E, row: int = 0) -> List[Polynomial]:
    """Row ``row`` of ``E E^T E - tr(E E^T) E / 2``."""
    rows = [E[i] for i in range(3)]

    def dot(a, b):
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

    G = [[dot(rows[i], rows[j]) for j in range(3)] for i in range(3)]
    tr = G[0][0] + G[1][1] + G[2][2]
    return [
        G[row][0] * E[0][col] + G[row][1] * E[1][col] + G[row][2] * E[2][col] - Fraction(1, 2) * tr * E[row][col]
        for col in range(3)
    ]


def essential_fixture() -> EssentialInstance:
    x = tuple(tuple(Fraction(v) for v in p) for p in ESSENTIAL_X)
    y = tuple(tuple(Fraction(v) for v in p) for p in ESSENTIAL_Y)
    E = essential_matrix_polys()
    nv = len(ESSENTIAL_NAMES)
    bilinear = []
    for xi, yi in zip(x, y):
        p = Polynomial(nv)
        for a in range(3):
            for b in range(3):
                if yi[a] and xi[b]:
                    p = p + E[a][b] * (yi[a] * xi[b])
        bilinear.append(p)
    g = PolySystem(bilinear + demazure_row(E, 0), ESSENTIAL_NAMES)
    r1, r3 = E[0], E[2]
    excl = PolySystem(
        [E[0][0], r1[0] * r3[0] + r1[1] * r3[1] + r1[2] * r3[2], r1[0] ** 2 + r1[1] ** 2 + r1[2] ** 2],
        ESSENTIAL_NAMES,
    )
    Eh = np.array([[float(Fraction(v)) for v in row] for row in E_HAT])
    exact = tuple(QI(Fraction(v)) for row in E_HAT for v in row)[1:]
    return EssentialInstance(x, y, g, excl, Eh, exact)
