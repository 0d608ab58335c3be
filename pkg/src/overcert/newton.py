"""Newton's method and alpha-theory certificates for square systems.

The scalar mode of a computation is decided by the point: exact points
(``QI`` coordinates) give hard certificates built from rational envelopes,
float points give soft certificates.  An exact system evaluated at a float
point is used through its float view; a float system cannot certify an exact
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BudgetExhausted,
    DimensionMismatch,
    ModeMismatch,
    NotSquare,
    PreconditionFailed,
    SingularJacobian,
)
from .linalg import inverse_exact, inverse_float, solve_exact, solve_float
from .poly import PolySystem, _point_mode, bw_norm_sq
from .scalar import QI, dyadic_round, sqrt_upper, to_exact

Real = Union[Fraction, float]

#: (13 - 3*sqrt(17)) / 4 as a float, used by soft certificates
ALPHA_THRESHOLD = (13 - 3 * math.sqrt(17)) / 4
#: below this alpha, the uniqueness ball of radius 1/(20*gamma) is available
ALPHA_SAME = Fraction(3, 100)
EPS = 2.0 ** -52
DEFAULT_PRECISION = 212
DEFAULT_SQRT_BITS = 64
DEFAULT_BUDGET = 64
# largest dyadic exponent used by an exact rate schedule; larger is still sound
_MAX_RATE_EXP = 1024


def alpha_below_threshold(a: Real) -> bool:
    """Whether ``a < (13 - 3*sqrt(17))/4``, decided exactly for rationals."""
    if isinstance(a, Fraction):
        if a < 0:
            return True
        t = 13 - 4 * a
        return t > 0 and t * t > 153
    return a < ALPHA_THRESHOLD


def _prepare(g: PolySystem, z):
    if not g.is_square:
        raise NotSquare(f"{len(g)} polynomials in {g.nvars} variables")
    if len(z) != g.nvars:
        raise DimensionMismatch(f"point has {len(z)} coordinates, expected {g.nvars}")
    zm = _point_mode(z)
    if zm is None:
        zm = g.exact
    if zm and not g.exact:
        raise ModeMismatch("a float system cannot certify an exact point")
    if zm:
        return g, tuple(to_exact(x) for x in z), True
    return g.floated, tuple(complex(x) for x in z), False


def _float_values(g: PolySystem, z):
    vals, jac = g.numeric.eval_jac(np.array([z], dtype=complex))
    v, J = vals[0], jac[0]
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(J))):
        raise SingularJacobian("non-finite values at the point")
    return v, J


def _norm_sq_exact(v: Sequence[QI]) -> Fraction:
    return sum((x.norm_sq() for x in v), Fraction(0))


def newton_step(g: PolySystem, z) -> tuple:
    """One Newton step ``z - Dg(z)^{-1} g(z)``."""
    g, z, exact = _prepare(g, z)
    if exact:
        step = solve_exact(g.jacobian(z), g(z))
        return tuple(a - b for a, b in zip(z, step))
    v, J = _float_values(g, z)
    step = solve_float(J, v)
    return tuple(complex(x) for x in np.asarray(z) - step)


def _float_allowance(g: PolySystem, z, Jinv: np.ndarray) -> float:
    # evaluation error of g(z) pushed through the inverse Jacobian
    err = g.numeric.term_counts * EPS * g.numeric.eval_abs(np.array([z]))[0]
    return float(np.linalg.norm(Jinv) * np.linalg.norm(err))


def beta(g: PolySystem, z, bits: int = DEFAULT_SQRT_BITS) -> Real:
    """Upper envelope of the Newton step length ``||Dg(z)^{-1} g(z)||``.

    Exact points give a rational upper bound.  Float points add an allowance
    for the rounding error in evaluating ``g(z)``.
    """
    g, z, exact = _prepare(g, z)
    if exact:
        step = solve_exact(g.jacobian(z), g(z))
        return sqrt_upper(_norm_sq_exact(step), bits)
    v, J = _float_values(g, z)
    Jinv = inverse_float(J)
    return float(np.linalg.norm(Jinv @ v)) + _float_allowance(g, z, Jinv)


def _gamma_sq_exact(g: PolySystem, z, Jinv) -> Fraction:
    nz = _norm_sq_exact(z)
    degs = g.degrees
    M2 = Fraction(0)
    for row in Jinv:
        for k, x in enumerate(row):
            d = degs[k]
            if d > 0 and x:
                M2 += x.norm_sq() * d * (1 + nz) ** (d - 1)
    mu2 = max(Fraction(1), bw_norm_sq(g) * M2)
    D = max(degs)
    return mu2 * D ** 3 / (4 * (1 + nz))


def _gamma_float(g: PolySystem, z, Jinv: np.ndarray) -> float:
    nz = float(np.sum(np.abs(np.asarray(z)) ** 2))
    degs = np.array(g.degrees, dtype=float)
    w = np.where(degs > 0, degs * (1 + nz) ** np.maximum(degs - 1, 0), 0.0)
    M2 = float(np.sum(np.abs(Jinv) ** 2 * w[None, :]))
    mu2 = max(1.0, float(bw_norm_sq(g)) * M2)
    D = max(g.degrees)
    # small relative inflation covers rounding in the float pipeline
    return math.sqrt(mu2 * D ** 3 / (4 * (1 + nz))) * (1 + 1e-12)


def gamma_bound(g: PolySystem, z, bits: int = DEFAULT_SQRT_BITS) -> Real:
    """Upper bound on Smale's gamma from the first derivative alone.

    Uses ``mu * D^{3/2} / (2 ||(1, z)||)`` with ``mu`` built from the
    Bombieri-Weyl norm of ``g`` and a Frobenius envelope of the scaled
    inverse Jacobian.
    """
    g, z, exact = _prepare(g, z)
    if exact:
        Jinv = inverse_exact(g.jacobian(z))
        return sqrt_upper(_gamma_sq_exact(g, z, Jinv), bits)
    v, J = _float_values(g, z)
    return _gamma_float(g, z, inverse_float(J))


@dataclass(frozen=True)
class AlphaCertificate:
    point: tuple
    exact: bool
    beta_upper: Optional[Real] = None
    gamma_upper: Optional[Real] = None
    alpha_upper: Optional[Real] = None
    certified: bool = False
    uniqueness_radius: Real = 0
    diagnostic: str = ""

    def to_record(self) -> dict:
        def s(x):
            return None if x is None else str(x)

        return {
            "mode": "exact" if self.exact else "soft",
            "beta_upper": s(self.beta_upper),
            "gamma_upper": s(self.gamma_upper),
            "alpha_upper": s(self.alpha_upper),
            "threshold": "(13-3*sqrt(17))/4",
            "certified": self.certified,
            "uniqueness_radius": s(self.uniqueness_radius),
            "diagnostic": self.diagnostic,
        }


def certify_square(g: PolySystem, z, bits: int = DEFAULT_SQRT_BITS) -> AlphaCertificate:
    """Alpha test at ``z``.  A singular Jacobian yields an uncertified result."""
    g, z, exact = _prepare(g, z)
    try:
        if exact:
            J = g.jacobian(z)
            Jinv = inverse_exact(J)
            vals = g(z)
            step = [sum((a * b for a, b in zip(row, vals)), QI(0)) for row in Jinv]
            b = sqrt_upper(_norm_sq_exact(step), bits)
            gm = sqrt_upper(_gamma_sq_exact(g, z, Jinv), bits)
        else:
            v, J = _float_values(g, z)
            Jinv = inverse_float(J)
            b = float(np.linalg.norm(Jinv @ v)) + _float_allowance(g, z, Jinv)
            gm = _gamma_float(g, z, Jinv)
    except SingularJacobian as exc:
        return AlphaCertificate(point=z, exact=exact, diagnostic=f"singular Jacobian: {exc}")
    a = b * gm
    if exact:
        uniq = 1 / (20 * gm) if a < ALPHA_SAME and gm else Fraction(0)
    else:
        uniq = 1 / (20 * gm) if a < float(ALPHA_SAME) and gm else 0.0
    ok = alpha_below_threshold(a)
    return AlphaCertificate(
        point=z,
        exact=exact,
        beta_upper=b,
        gamma_upper=gm,
        alpha_upper=a,
        certified=ok,
        uniqueness_radius=uniq,
        diagnostic="" if ok else "alpha above threshold",
    )


@dataclass(frozen=True)
class RateSchedule:
    """Quadratic convergence radii ``rate(k) = 2^(-2^(k-1)) * beta0``.

    ``beta0`` is the radius at the certified point (twice its beta), and
    ``rate(0) = beta0``.
    """

    beta0: Real

    def rate(self, k: int) -> Real:
        if k <= 0:
            return self.beta0
        if isinstance(self.beta0, Fraction):
            e = min(2 ** (k - 1), _MAX_RATE_EXP) if k <= 12 else _MAX_RATE_EXP
            return self.beta0 / (1 << e)
        if k > 11:
            return 0.0
        return self.beta0 * 2.0 ** (-(2 ** (k - 1)))


@dataclass(frozen=True)
class Candidate:
    """An approximate solution: a point with a certified radius.

    ``rho`` is ``None`` until a certificate is attached.  ``steps_since_cert``
    counts Newton steps taken since ``schedule`` was anchored.
    """

    point: tuple
    rho: Optional[Real] = None
    iterate_count: int = 0
    source_system_id: str = ""
    certificate: Optional[AlphaCertificate] = None
    schedule: Optional[RateSchedule] = None
    steps_since_cert: int = 0
    flag: str = ""

    @property
    def exact(self) -> bool:
        return bool(_point_mode(self.point))

    @property
    def certified(self) -> bool:
        return self.rho is not None

    def to_float(self) -> "Candidate":
        rho = None if self.rho is None else float(self.rho)
        return replace(self, point=tuple(complex(x) for x in self.point), rho=rho,
                       certificate=None, schedule=None, steps_since_cert=0)

    def to_exact(self) -> "Candidate":
        return replace(self, point=tuple(to_exact(x) for x in self.point), rho=None,
                       certificate=None, schedule=None, steps_since_cert=0)


def certify_candidate(g: PolySystem, c: Union[Candidate, Sequence], source_system_id: str = "",
                      bits: int = DEFAULT_SQRT_BITS) -> Candidate:
    """Attach a fresh certificate; ``rho = 2*beta`` when it passes."""
    if not isinstance(c, Candidate):
        c = Candidate(point=tuple(c), source_system_id=source_system_id)
    cert = certify_square(g, c.point, bits)
    if cert.certified:
        rho = 2 * cert.beta_upper
        return replace(c, point=cert.point, rho=rho, certificate=cert,
                       schedule=RateSchedule(rho), steps_since_cert=0, flag="")
    return replace(c, point=cert.point, rho=None, certificate=cert, schedule=None,
                   steps_since_cert=0, flag=cert.diagnostic)


def certify_with_fallback(g: PolySystem, c: Union[Candidate, Sequence], source_system_id: str = "") -> Candidate:
    """Float certificate first; for an exact ``g`` retry in exact arithmetic at the same point.

    Far from the origin the float rounding allowance can swamp ``beta`` even
    though the point is an excellent approximation.
    """
    c = certify_candidate(g, c, source_system_id)
    if not c.certified and g.exact and not c.exact:
        c = certify_candidate(g, c.to_exact())
    return c


def _dist_sq(z1, z2, exact: bool):
    if exact:
        return sum(((to_exact(a) - to_exact(b)).norm_sq() for a, b in zip(z1, z2)), Fraction(0))
    return float(sum(abs(complex(a) - complex(b)) ** 2 for a, b in zip(z1, z2)))


def distance(z1, z2) -> float:
    return math.sqrt(float(_dist_sq(z1, z2, False)))


def distinct(c1: Candidate, c2: Candidate) -> bool:
    """Strict test ``||z1 - z2|| > rho1 + rho2``; proves distinct associated solutions."""
    if len(c1.point) != len(c2.point):
        raise DimensionMismatch("candidates live in different spaces")
    if c1.rho is None or c2.rho is None:
        raise PreconditionFailed("distinct() needs certified candidates")
    if c1.exact or c2.exact:
        r = Fraction(c1.rho) + Fraction(c2.rho)
        return _dist_sq(c1.point, c2.point, True) > r * r
    r = float(c1.rho) + float(c2.rho)
    return _dist_sq(c1.point, c2.point, False) > r * r


def same_root(g: PolySystem, cert: AlphaCertificate, z2) -> bool:
    """Whether ``z2`` lies in the uniqueness ball of the certified point."""
    if cert.alpha_upper is None or not (cert.alpha_upper < (ALPHA_SAME if cert.exact else float(ALPHA_SAME))):
        raise PreconditionFailed("same_root needs alpha below 0.03")
    if len(z2) != len(cert.point):
        raise DimensionMismatch("point length differs from the certificate")
    if cert.exact:
        return 400 * cert.gamma_upper ** 2 * _dist_sq(cert.point, z2, True) < 1
    return 20 * cert.gamma_upper * math.sqrt(_dist_sq(cert.point, z2, False)) < 1


def refine(g: PolySystem, c: Candidate, k: int, recertify: bool = False,
           precision: int = DEFAULT_PRECISION, bits: int = DEFAULT_SQRT_BITS) -> Candidate:
    """Apply ``k`` Newton steps and update the certified radius.

    With a held schedule the radius follows the quadratic rate.  Exact points
    are rounded to dyadic rationals after each step; if rounding moved the
    point, the certificate is recomputed where the point actually is.  Float
    radii never drop below twice the soft beta at the new point.
    """
    if k <= 0:
        return c
    gs, z, exact = _prepare(g, c.point)
    done, rounded, flag = 0, False, ""
    for _ in range(k):
        try:
            zn = newton_step(gs, z)
        except SingularJacobian as exc:
            flag = f"singular Jacobian after {done} steps: {exc}"
            break
        if exact:
            zr = tuple(dyadic_round(x, precision) for x in zn)
            rounded = rounded or zr != zn
            zn = zr
        z = zn
        done += 1
    out = replace(c, point=z, iterate_count=c.iterate_count + done, flag=flag)
    if done == 0:
        return out
    held = c.schedule is not None and c.rho is not None
    if recertify or not held or (exact and rounded):
        fresh = certify_candidate(gs, out, bits=bits)
        if fresh.certified or not held or exact:
            return replace(fresh, iterate_count=out.iterate_count, flag=flag or fresh.flag)
    steps = c.steps_since_cert + done
    rho = c.schedule.rate(steps)
    if not exact:
        try:
            rho = max(rho, 2 * beta(gs, z))
        except SingularJacobian:
            pass
    return replace(out, rho=rho, steps_since_cert=steps)


def separate_all(g: PolySystem, S: Sequence[Candidate], budget: int = DEFAULT_BUDGET) -> List[Candidate]:
    """Refine until all pairs are distinct, merging candidates with a common root."""
    work = list(S)
    if any(not c.certified for c in work):
        raise PreconditionFailed("separate_all needs certified candidates")
    used = [0] * len(work)
    while True:
        pair = next(((i, j) for i in range(len(work)) for j in range(i + 1, len(work))
                     if not distinct(work[i], work[j])), None)
        if pair is None:
            return work
        i, j = pair
        merged = False
        for a, b in ((i, j), (j, i)):
            cert = certify_square(g, work[a].point)
            lim = ALPHA_SAME if cert.exact else float(ALPHA_SAME)
            if cert.alpha_upper is not None and cert.alpha_upper < lim and same_root(g, cert, work[b].point):
                del work[b]
                del used[b]
                merged = True
                break
        if merged:
            continue
        for a in (i, j):
            if used[a] >= budget:
                raise BudgetExhausted(f"candidates {i} and {j} not separated within {budget} steps")
            work[a] = refine(g, work[a], 1)
            used[a] += 1
            if not work[a].certified:
                raise BudgetExhausted(f"candidate {a} lost its certificate during separation")
