"""Sparse multivariate polynomials over exact Gaussian rationals or complex floats.

A :class:`Polynomial` maps exponent tuples to coefficients.  Coefficients are
either all :class:`~overcert.scalar.QI` (exact mode) or all ``complex``
(float mode).  Systems of polynomials are :class:`PolySystem`.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product as iproduct
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, ModeMismatch, NotSquare
from .scalar import QI, abs_sq, abs_upper, check_finite, to_exact

__all__ = [
    "Monomial",
    "MonomialOrder",
    "GREVLEX",
    "Polynomial",
    "PolySystem",
    "NumericSystem",
    "variables",
    "eval_poly",
    "partial",
    "jacobian",
    "taylor_coefficients",
    "deriv_ell1_bound",
    "bw_norm_sq",
    "bezout_bound",
]

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class MonomialOrder:
    """A multiplicative monomial order.

    ``variable_order`` lists variable indices from largest to smallest, so the
    default ``None`` means ``x1 > x2 > ... > xn``.
    """

    kind: str = "grevlex"
    variable_order: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, e: Monomial):
        """Sort key; larger keys are larger monomials."""
        if self.variable_order is not None:
            e = tuple(e[v] for v in self.variable_order)
        if self.kind == "lex":
            return tuple(e)
        return (sum(e),) + tuple(-x for x in reversed(e))

    def max(self, exps: Iterable[Monomial]) -> Monomial:
        return max(exps, key=self.key)

    def sorted(self, exps: Iterable[Monomial], descending: bool = True) -> List[Monomial]:
        return sorted(exps, key=self.key, reverse=descending)


GREVLEX = MonomialOrder("grevlex")


def _coerce_coeff(c):
    if isinstance(c, QI):
        return c
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, (int, Fraction)):
        return QI(c)
    if isinstance(c, (float, complex)):
        c = complex(c)
        check_finite(c)
        return c
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "__dict__")

    def __init__(self, nvars: int, terms: Optional[Dict[Monomial, object]] = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        clean: Dict[Monomial, object] = {}
        exact = None
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise DimensionMismatch(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = _coerce_coeff(c)
            is_q = isinstance(c, QI)
            if exact is None:
                exact = is_q
            elif exact != is_q:
                raise ModeMismatch("polynomial mixes exact and float coefficients")
            if e in clean:
                c = clean[e] + c
            clean[e] = c
        self.nvars = nvars
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def parse(cls, text: str, names: Sequence[str]) -> "Polynomial":
        """Parse an arithmetic expression such as ``"z1*z2 - z2^2 + 3/4"``.

        ``i`` (or ``I``) denotes the imaginary unit unless it is a variable name.
        Integer and rational literals stay exact; decimal literals are read as
        exact rationals of their decimal expansion.
        """
        nv = len(names)
        env = {name: cls.variable(nv, k) for k, name in enumerate(names)}
        for unit in ("i", "I"):
            env.setdefault(unit, cls.constant(nv, QI(0, 1)))
        tree = ast.parse(text.replace("^", "**"), mode="eval")

        def ev(node):
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.Constant):
                if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                    raise ValueError(f"bad literal {node.value!r}")
                if isinstance(node.value, float):
                    src = ast.get_source_segment(text.replace("^", "**"), node)
                    return cls.constant(nv, Fraction(src))
                return cls.constant(nv, node.value)
            if isinstance(node, ast.Name):
                if node.id not in env:
                    raise ValueError(f"unknown variable {node.id!r}")
                return env[node.id]
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                v = ev(node.operand)
                return -v if isinstance(node.op, ast.USub) else v
            if isinstance(node, ast.BinOp):
                a = ev(node.left)
                if isinstance(node.op, ast.Pow):
                    k = node.right
                    if not (isinstance(k, ast.Constant) and isinstance(k.value, int)):
                        raise ValueError("exponents must be integer literals")
                    return a ** k.value
                b = ev(node.right)
                if isinstance(node.op, ast.Add):
                    return a + b
                if isinstance(node.op, ast.Sub):
                    return a - b
                if isinstance(node.op, ast.Mult):
                    return a * b
                if isinstance(node.op, ast.Div):
                    if b.degree > 0:
                        raise ValueError("division by a non-constant")
                    return a * (1 / b.constant_term())
            raise ValueError(f"unsupported syntax: {ast.dump(node)}")

        return ev(tree)

    # properties -------------------------------------------------------
    @property
    def exact(self) -> Optional[bool]:
        """``True``/``False`` for exact/float coefficients, ``None`` for zero."""
        for c in self.terms.values():
            return isinstance(c, QI)
        return None

    @cached_property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        z = (0,) * self.nvars
        if z in self.terms:
            return self.terms[z]
        return QI(0) if self.exact is not False else 0j

    def coefficient(self, e: Monomial):
        return self.terms.get(tuple(e), 0)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, object]]:
        return iter(self.terms.items())

    # conversions ------------------------------------------------------
    def to_float(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: complex(c) for e, c in self.terms.items()})

    def to_exact(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: to_exact(c) for e, c in self.terms.items()})

    def map_coeffs(self, fn) -> "Polynomial":
        return Polynomial(self.nvars, {e: fn(c) for e, c in self.terms.items()})

    # arithmetic -------------------------------------------------------
    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials live in different rings")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _coerce_coeff(other)
            return Polynomial(self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._lift(other)
        out: Dict[Monomial, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        out = Polynomial.constant(self.nvars, 1 if self.exact is not False else 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction, QI)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # evaluation -------------------------------------------------------
    def __call__(self, z):
        return eval_poly(self, z)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.to_string()!r})"

    def to_string(self, names: Optional[Sequence[str]] = None, order: MonomialOrder = GREVLEX) -> str:
        names = list(names) if names else [f"z{k + 1}" for k in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e in order.sorted(self.terms):
            c = self.terms[e]
            mono = "*".join(
                f"{names[k]}^{x}" if x > 1 else names[k] for k, x in enumerate(e) if x
            )
            cs = str(c) if isinstance(c, QI) else repr(c)
            if isinstance(c, QI) and c.im:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __str__ = to_string


def variables(nvars: int) -> Tuple[Polynomial, ...]:
    """The coordinate functions ``z1, ..., zn`` as exact polynomials."""
    return tuple(Polynomial.variable(nvars, k) for k in range(nvars))


def _check_point(p_nvars: int, z) -> None:
    if len(z) != p_nvars:
        raise DimensionMismatch(f"point has {len(z)} coordinates, expected {p_nvars}")


def _point_mode(z) -> Optional[bool]:
    # ints and Fractions are neutral: they embed exactly in either mode
    modes = {isinstance(x, QI) for x in z if not isinstance(x, (int, Fraction))}
    if len(modes) > 1:
        raise ModeMismatch("point mixes exact and float coordinates")
    return modes.pop() if modes else None


def _powers(z, degs):
    out = []
    for x, d in zip(z, degs):
        row = [x ** 0 if not isinstance(x, QI) else QI(1)]
        for _ in range(d):
            row.append(row[-1] * x)
        out.append(row)
    return out


def eval_poly(p: Polynomial, z):
    """Value of ``p`` at ``z``; bit-exact for exact inputs."""
    _check_point(p.nvars, z)
    pm, zm = p.exact, _point_mode(z)
    if pm is not None and zm is not None and pm != zm:
        raise ModeMismatch("polynomial and point are in different scalar modes")
    exact = pm if pm is not None else bool(zm)
    if exact:
        z = [to_exact(x) for x in z]
    else:
        z = [complex(x) for x in z]
    if not p.terms:
        return QI(0) if exact else 0j
    degs = [max(e[k] for e in p.terms) for k in range(p.nvars)]
    pw = _powers(z, degs)
    total = QI(0) if exact else 0j
    for e, c in p.terms.items():
        t = c
        for k, x in enumerate(e):
            if x:
                t = t * pw[k][x]
        total = total + t
    if not exact:
        check_finite(total)
    return total


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


def partial(p: Polynomial, a: Sequence[int]) -> Polynomial:
    """The derivative ``d^a p`` for a multi-index ``a``."""
    a = tuple(a)
    if len(a) != p.nvars:
        raise DimensionMismatch("multi-index length differs from nvars")
    out = {}
    for e, c in p.terms.items():
        if all(x >= y for x, y in zip(e, a)):
            f = 1
            for x, y in zip(e, a):
                f *= _falling(x, y)
            out[tuple(x - y for x, y in zip(e, a))] = c * f
    return Polynomial(p.nvars, out)


def _unit(n: int, j: int) -> Tuple[int, ...]:
    return tuple(1 if k == j else 0 for k in range(n))


def jacobian(sys: "PolySystem", z) -> List[list]:
    """Jacobian matrix ``Df(z)`` as a list of rows."""
    _check_point(sys.nvars, z)
    return [[eval_poly(d, z) for d in row] for row in sys.derivatives]


def taylor_coefficients(p: Polynomial, z) -> Dict[Monomial, object]:
    """Coefficients ``c_a = d^a p(z) / a!`` of ``p(z + w) = sum c_a w^a``."""
    _check_point(p.nvars, z)
    exact = p.exact if p.exact is not None else bool(_point_mode(z))
    z = [to_exact(x) for x in z] if exact else [complex(x) for x in z]
    if not p.terms:
        return {}
    degs = [max(e[k] for e in p.terms) for k in range(p.nvars)]
    pw = _powers(z, degs)
    out: Dict[Monomial, object] = {}
    for e, c in p.terms.items():
        for a in iproduct(*(range(x + 1) for x in e)):
            t = c
            for k, (x, y) in enumerate(zip(e, a)):
                b = math.comb(x, y)
                if b != 1:
                    t = t * b
                if x - y:
                    t = t * pw[k][x - y]
            out[a] = out[a] + t if a in out else t
    return out


def deriv_ell1_bound(p: Polynomial, z, k: int):
    """``B_k(p, z) = sum_{|a|=k} |d^a p(z)| / a!``.

    Bounds ``|D^k p(z)(w, ..., w)| / k!`` by ``B_k * ||w||**k``.  Exact inputs
    use ``|x| + |y|`` for ``|x + iy|`` so the returned rational dominates.
    """
    if k < 1:
        raise ValueError("order must be at least 1")
    tc = taylor_coefficients(p, z)
    return _ell1_from_taylor(tc, k, p.exact)


def _ell1_from_taylor(tc, k: int, exact):
    if exact is None:
        exact = any(isinstance(v, QI) for v in tc.values())
    total = Fraction(0) if exact else 0.0
    for a, c in tc.items():
        if sum(a) == k:
            total += abs_upper(c)
    return total


def bw_norm_sq(sys) -> object:
    """Squared Bombieri-Weyl norm of the homogenized system, summed over polynomials.

    ``sum_i sum_a |c_a|^2 * a! (d_i - |a|)! / d_i!`` with ``d_i = deg f_i``.
    Exact for exact systems.
    """
    polys = sys.polys if isinstance(sys, PolySystem) else sys
    total = None
    for p in polys:
        d = p.degree
        for e, c in p.terms.items():
            w = Fraction(math.prod(math.factorial(x) for x in e) * math.factorial(d - sum(e)), math.factorial(d))
            term = abs_sq(c) * (w if isinstance(c, QI) else float(w))
            total = term if total is None else total + term
    return total if total is not None else Fraction(0)


def bezout_bound(sys: "PolySystem") -> int:
    """Product of the degrees of a square system."""
    if not sys.is_square:
        raise NotSquare(f"{len(sys)} polynomials in {sys.nvars} variables")
    if any(p.is_zero() for p in sys.polys):
        raise ValueError("the zero polynomial has no finite Bezout number")
    return math.prod(p.degree for p in sys.polys)


class PolySystem:
    """An ordered list of polynomials sharing one ring."""

    def __init__(self, polys: Sequence[Polynomial], names: Optional[Sequence[str]] = None):
        polys = tuple(polys)
        if not polys:
            raise ValueError("a system needs at least one polynomial")
        n = polys[0].nvars
        if any(p.nvars != n for p in polys):
            raise DimensionMismatch("polynomials have different numbers of variables")
        modes = {p.exact for p in polys} - {None}
        if len(modes) > 1:
            raise ModeMismatch("system mixes exact and float polynomials")
        self.polys = polys
        self.nvars = n
        self.names = tuple(names) if names else tuple(f"z{k + 1}" for k in range(n))
        if len(self.names) != n:
            raise DimensionMismatch("wrong number of variable names")

    @property
    def exact(self) -> bool:
        return all(p.exact is not False for p in self.polys)

    @property
    def is_square(self) -> bool:
        return len(self.polys) == self.nvars

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(p.degree for p in self.polys)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return PolySystem(self.polys[k], self.names)
        return self.polys[k]

    def __add__(self, other: "PolySystem") -> "PolySystem":
        return PolySystem(self.polys + tuple(other.polys), self.names)

    def __repr__(self):
        return f"PolySystem({len(self)} polys in {self.nvars} vars)"

    @cached_property
    def derivatives(self) -> Tuple[Tuple[Polynomial, ...], ...]:
        n = self.nvars
        return tuple(tuple(partial(p, _unit(n, j)) for j in range(n)) for p in self.polys)

    def __call__(self, z) -> list:
        return [eval_poly(p, z) for p in self.polys]

    def jacobian(self, z) -> List[list]:
        return jacobian(self, z)

    def to_float(self) -> "PolySystem":
        return PolySystem([p.to_float() for p in self.polys], self.names)

    def to_exact(self) -> "PolySystem":
        return PolySystem([p.to_exact() for p in self.polys], self.names)

    @cached_property
    def floated(self) -> "PolySystem":
        """This system in float mode (itself when already float)."""
        return self.to_float() if self.exact else self

    @cached_property
    def numeric(self) -> "NumericSystem":
        return NumericSystem(self)


class NumericSystem:
    """Vectorized float evaluation of a system at many points at once."""

    def __init__(self, sys: PolySystem):
        monos = sorted({e for p in sys.polys for e in p.terms})
        if not monos:
            monos = [(0,) * sys.nvars]
        index = {e: k for k, e in enumerate(monos)}
        self.nvars = sys.nvars
        self.exps = np.array(monos, dtype=np.int64).reshape(len(monos), sys.nvars)
        self.coeffs = np.zeros((len(sys.polys), len(monos)), dtype=complex)
        for i, p in enumerate(sys.polys):
            for e, c in p.terms.items():
                self.coeffs[i, index[e]] = complex(c)
        self.maxdeg = int(self.exps.max()) if self.exps.size else 0

    def _power_table(self, Z):
        Z = np.asarray(Z, dtype=complex)
        P = np.ones(Z.shape + (self.maxdeg + 1,), dtype=complex)
        for d in range(1, self.maxdeg + 1):
            P[..., d] = P[..., d - 1] * Z
        return P

    def _monomials(self, P):
        # P: (S, n, maxdeg+1) -> (S, M)
        cols = np.arange(self.nvars)
        return np.prod(P[:, cols[None, :], self.exps], axis=2)

    def eval(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        V = self._monomials(self._power_table(Z))
        return V @ self.coeffs.T

    def eval_abs(self, Z) -> np.ndarray:
        """``sum_a |c_a| |z^a|`` per polynomial, shape ``(S, N)``."""
        Z = np.atleast_2d(np.abs(np.asarray(Z, dtype=complex)))
        V = self._monomials(self._power_table(Z)).real
        return V @ np.abs(self.coeffs).T

    @cached_property
    def term_counts(self) -> np.ndarray:
        return np.count_nonzero(self.coeffs, axis=1)

    def eval_jac(self, Z):
        """Values ``(S, N)`` and Jacobians ``(S, N, n)`` at points ``Z`` of shape ``(S, n)``."""
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        P = self._power_table(Z)
        cols = np.arange(self.nvars)
        F = P[:, cols[None, :], self.exps]  # (S, M, n)
        V = np.prod(F, axis=2)
        J = np.empty((Z.shape[0], self.coeffs.shape[0], self.nvars), dtype=complex)
        for j in range(self.nvars):
            ej = self.exps[:, j]
            G = F.copy()
            G[:, :, j] = ej[None, :] * P[:, j, np.maximum(ej - 1, 0)]
            J[:, :, j] = np.prod(G, axis=2) @ self.coeffs.T
        return V @ self.coeffs.T, J
