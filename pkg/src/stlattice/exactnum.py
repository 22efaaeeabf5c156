"""Exact numbers: rationals (``fractions.Fraction``) and elements a + b*sqrt(d).

A ``Number`` is either a ``Fraction`` (ints are accepted wherever a Fraction
is) or a :class:`QuadExt` with a nonzero irrational part.  Arithmetic on
QuadExt values collapses back to ``Fraction`` whenever the sqrt(d) coefficient
vanishes, so a rational value always has exactly one representation and
hashing/equality across the two types stays consistent.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .errors import InvalidArgument

__all__ = [
    "Fraction", "QuadExt", "Number", "canonical", "st_of", "quad_mul",
    "as_number", "is_rational", "parse_number", "format_number", "sqrt",
]


def canonical(num: int, den: int) -> Fraction:
    """Reduced fraction num/den with a positive denominator."""
    if den == 0:
        raise InvalidArgument("zero denominator")
    return Fraction(num, den)


def st_of(k) -> tuple[int, int]:
    """The unique coprime (s, t) with k = s/t, for positive rational k."""
    k = Fraction(k)
    if k <= 0:
        raise InvalidArgument(f"st_of needs a positive rational, got {k}")
    return k.numerator, k.denominator


def _squarefree_nonsquare(d: int) -> bool:
    if d < 2:
        return False
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 1
    return True


class QuadExt:
    """a + b*sqrt(d) with rational a, b and squarefree d > 1.

    Instances are immutable.  Use :func:`sqrt` or the arithmetic operators
    rather than the constructor when b may be zero; the constructor keeps
    b == 0 as is so that (a, b, d) round-trips literally.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if not _squarefree_nonsquare(d):
            raise InvalidArgument(f"d={d} must be a squarefree integer > 1")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    @staticmethod
    def _make(a, b, d):
        if b == 0:
            return Fraction(a)
        q = QuadExt.__new__(QuadExt)
        object.__setattr__(q, "a", a)
        object.__setattr__(q, "b", b)
        object.__setattr__(q, "d", d)
        return q

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise InvalidArgument(
                    f"mixed radicals sqrt({self.d}) and sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def conjugate(self):
        return QuadExt._make(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt._make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._make(-self.a, -self.b, self.d)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt._make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt._make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return QuadExt._make(self.a * a + self.b * b * self.d,
                             self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def _inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return QuadExt._make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            self._coerce(other)
            return self * other._inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return QuadExt._make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._inverse() * other
        return NotImplemented

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, QuadExt):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadExt({format_number(self)!r})"

    def __str__(self):
        return format_number(self)


Number = Union[Fraction, QuadExt]


def sqrt(d: int) -> QuadExt:
    """sqrt(d) as an exact QuadExt."""
    return QuadExt(0, 1, d)


def quad_mul(x: QuadExt, y: QuadExt):
    if x.d != y.d:
        raise InvalidArgument(f"mismatched radicals: {x.d} vs {y.d}")
    return x * y


def as_number(x) -> Number:
    if isinstance(x, QuadExt):
        return QuadExt._make(x.a, x.b, x.d)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_number(x)
    raise InvalidArgument(f"not an exact number: {x!r}")


def is_rational(x) -> bool:
    return not isinstance(x, QuadExt) or x.b == 0


def _format_rat(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_number(x) -> str:
    """Rationals as "p/q" ("p" when q == 1); QuadExt as "p/q+r/s*sqrt(d)"."""
    if isinstance(x, QuadExt):
        b = _format_rat(x.b)
        sep = "" if b.startswith("-") else "+"
        return f"{_format_rat(x.a)}{sep}{b}*sqrt({x.d})"
    return _format_rat(Fraction(x))


_RAT = r"-?\d+(?:/\d+)?"
_QUAD_RE = re.compile(rf"^({_RAT})([+-]\d+(?:/\d+)?)\*sqrt\((\d+)\)$")
_RAT_RE = re.compile(rf"^{_RAT}$")


def parse_number(text: str) -> Number:
    s = text.strip().replace(" ", "")
    m = _QUAD_RE.match(s)
    if m:
        d = int(m.group(3))
        if not _squarefree_nonsquare(d):
            raise InvalidArgument(f"sqrt({d}): d must be a squarefree integer > 1")
        return QuadExt._make(Fraction(m.group(1)), Fraction(m.group(2)), d)
    if _RAT_RE.match(s):
        num, _, den = s.partition("/")
        return canonical(int(num), int(den) if den else 1)
    raise InvalidArgument(f"cannot parse number {text!r}")

