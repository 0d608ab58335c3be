"""Taylor residuals: certified lower bounds on ``|f|`` over a ball.

A positive residual of ``f_i`` on the ball ``B(z, rho)`` proves that ``f_i``
has no zero there, so the solution associated to a candidate with radius
``rho`` is not a zero of ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .errors import DimensionMismatch, ModeMismatch, PreconditionFailed
from .newton import EPS, Candidate, refine
from .poly import Polynomial, PolySystem, _point_mode, taylor_coefficients
from .scalar import abs_lower, abs_upper, to_exact

Real = Union[Fraction, float]


def taylor_residual(p: Polynomial, z, rho) -> Real:
    """``L(p, z) - sum_k B_k(p, z) * rho^k``.

    ``L`` is a lower bound on ``|p(z)|``: ``max(|Re|, |Im|)`` for exact
    points, and ``|p(z)|`` less a rounding allowance for float points.
    """
    if len(z) != p.nvars:
        raise DimensionMismatch(f"point has {len(z)} coordinates, expected {p.nvars}")
    if rho < 0:
        raise ValueError("rho must be non-negative")
    zm = _point_mode(z)
    exact = zm if zm is not None else p.exact is not False
    if exact and p.exact is False:
        raise ModeMismatch("float polynomial at an exact point")
    if p.is_zero():
        return Fraction(0) if exact else 0.0
    if exact:
        z = tuple(to_exact(x) for x in z)
        rho = Fraction(rho)
    else:
        if p.exact:
            p = p.to_float()
        z = tuple(complex(x) for x in z)
        rho = float(rho)
    tc = taylor_coefficients(p, z)
    zero = (0,) * p.nvars
    value = tc.get(zero, 0)
    bounds = [Fraction(0) if exact else 0.0] * (p.degree + 1)
    for a, c in tc.items():
        k = sum(a)
        if k:
            bounds[k] += abs_upper(c)
    if exact:
        low = abs_lower(value) if value else Fraction(0)
    else:
        zinf = max(1.0, max(abs(x) for x in z))
        mass = sum(abs(c) for c in p.terms.values())
        low = abs(value) - len(p.terms) * EPS * mass * zinf ** p.degree
    total = low
    rk = rho
    for k in range(1, p.degree + 1):
        total -= bounds[k] * rk
        rk *= rho
    return total


@dataclass(frozen=True)
class TaylorResidualReport:
    per_poly: List[Tuple[int, Real]]
    system_residual: Real
    rho_used: Real

    @property
    def rejected(self) -> bool:
        return self.system_residual > 0

    @property
    def witness(self) -> Optional[int]:
        """Index of a polynomial with positive residual, if any."""
        if not self.rejected:
            return None
        return max(self.per_poly, key=lambda t: t[1])[0]

    def to_record(self) -> dict:
        return {
            "per_poly": [[i, str(v)] for i, v in self.per_poly],
            "system_residual": str(self.system_residual),
            "rho_used": str(self.rho_used),
            "witness": self.witness,
        }


def residual_report(f: PolySystem, c: Candidate) -> TaylorResidualReport:
    if c.rho is None:
        raise PreconditionFailed("candidate has no certified radius")
    if len(c.point) != f.nvars:
        raise DimensionMismatch("candidate and system dimensions differ")
    per = [(i, taylor_residual(p, c.point, c.rho)) for i, p in enumerate(f.polys)]
    return TaylorResidualReport(per, max(v for _, v in per), c.rho)


@dataclass(frozen=True)
class Rejected:
    report: TaylorResidualReport
    steps: int
    candidate: Candidate


@dataclass(frozen=True)
class NotRejected:
    candidate: Candidate
    diagnostic: str = ""


def refine_and_reject(f: PolySystem, g: PolySystem, c: Candidate, max_steps: int = 20):
    """Refine with ``g`` until some residual of ``f`` turns positive."""
    report = residual_report(f, c)
    if report.rejected:
        return Rejected(report, 0, c)
    for step in range(1, max_steps + 1):
        c = refine(g, c, 1)
        if c.flag or not c.certified:
            return NotRejected(c, c.flag or "certificate lost during refinement")
        report = residual_report(f, c)
        if report.rejected:
            return Rejected(report, step, c)
    return NotRejected(c, f"no positive residual after {max_steps} steps")
