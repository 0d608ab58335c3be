"""Scalars in two modes: exact Gaussian rationals and complex floats.

Exact values are :class:`QI` instances (``re + i*im`` with ``Fraction`` parts).
Float values are plain Python ``complex``.  The two modes never mix; any
arithmetic between a ``QI`` and a float raises :class:`ModeMismatch`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import ModeMismatch, NonFiniteResult

__all__ = [
    "QI",
    "Scalar",
    "to_exact",
    "to_float",
    "is_exact",
    "sqrt_upper",
    "sqrt_lower",
    "abs_upper",
    "abs_lower",
    "abs_sq",
    "check_finite",
    "dyadic_round",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ModeMismatch(f"cannot use {type(x).__name__} as an exact rational")


class QI:
    """Gaussian rational ``re + i*im`` with exact arithmetic.

    >>> QI(1, 2) * QI(1, -2)
    QI('5')
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, (float, complex)):
            raise ModeMismatch("float value in exact arithmetic; convert with to_exact()")
        return cls(_frac(x))

    # arithmetic -------------------------------------------------------
    def _other(self, other):
        if isinstance(other, QI):
            return other
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return QI(other)
        if isinstance(other, (float, complex)):
            raise ModeMismatch("cannot mix exact and float scalars")
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return QI(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not self.im and not o.im:
            return QI(self.re * o.re)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by exact zero")
        if not o.im:
            return QI(self.re / o.re, self.im / o.re)
        return QI((self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QI(1) / (self ** (-k))
        out, base = QI(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        """``|z|**2``, exactly."""
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({str(self)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


Scalar = Union[QI, complex]


def is_exact(x) -> bool:
    return isinstance(x, QI)


def to_exact(x) -> QI:
    """Exact Gaussian rational equal to ``x`` (floats convert bit-exactly)."""
    if isinstance(x, QI):
        return x
    if isinstance(x, complex):
        check_finite(x)
        return QI(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, float):
        check_finite(x)
        return QI(Fraction(x))
    return QI(_frac(x))


def to_float(x) -> complex:
    if isinstance(x, QI):
        return complex(x)
    return complex(x)


def check_finite(x) -> None:
    if isinstance(x, complex):
        if not (math.isfinite(x.real) and math.isfinite(x.imag)):
            raise NonFiniteResult(f"non-finite value {x}")
    elif isinstance(x, float) and not math.isfinite(x):
        raise NonFiniteResult(f"non-finite value {x}")


# envelopes ------------------------------------------------------------------

def abs_sq(x) -> Union[Fraction, float]:
    if isinstance(x, QI):
        return x.norm_sq()
    return abs(x) ** 2


def abs_upper(x) -> Union[Fraction, float]:
    """Upper envelope of ``|x|``: ``|re| + |im|`` exactly, ``abs`` in float mode."""
    if isinstance(x, QI):
        return abs(x.re) + abs(x.im)
    return abs(x)


def abs_lower(x) -> Union[Fraction, float]:
    """Lower envelope of ``|x|``: ``max(|re|, |im|)`` exactly, ``abs`` in float mode."""
    if isinstance(x, QI):
        return max(abs(x.re), abs(x.im))
    return abs(x)


def _sqrt_parts(q: Fraction, bits: int):
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    if q == 0:
        return 0, 0, 1, True
    a, b = q.numerator, q.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return ra, ra, rb, True
    ab = a * b
    k = max(0, bits + 2 - math.isqrt(ab).bit_length())
    s = math.isqrt(ab << (2 * k))
    return s, s + 1, b << k, False


def sqrt_upper(q, bits: int = 64) -> Fraction:
    """Rational ``u`` with ``u*u >= q`` and ``u <= (1 + 2**-bits) * sqrt(q)``."""
    lo, hi, den, exact = _sqrt_parts(q, bits)
    return Fraction(hi, den)


def sqrt_lower(q, bits: int = 64) -> Fraction:
    """Rational ``l`` with ``l*l <= q`` and ``l >= (1 - 2**-bits) * sqrt(q)``."""
    lo, hi, den, exact = _sqrt_parts(q, bits)
    return Fraction(lo, den)


def dyadic_round(x: QI, precision: int) -> QI:
    """Bound the denominators of both parts of ``x`` by ``2**precision``.

    Parts whose denominator already fits are kept as they are; the rest are
    rounded to the nearest multiple of ``2**-precision``.
    """
    scale = 1 << precision

    def rnd(f: Fraction) -> Fraction:
        if f.denominator <= scale:
            return f
        return Fraction(round(f * scale), scale)

    return QI(rnd(x.re), rnd(x.im))
