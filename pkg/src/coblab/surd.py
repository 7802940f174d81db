"""Exact arithmetic in real quadratic fields Q(sqrt(d)).

A value is stored as (a + b*sqrt(d))/c with integers a, b, c > 0 and d
squarefree, reduced so gcd(a, b, c) = 1. Signs, comparisons, floors and
integer-distance computations are exact integer work; floating point only
appears in derived conveniences (``float()``, fixed-point reducers) whose
error is bounded and documented at the call sites.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Union

from .certify import Enclosure, refine
from .errors import ConfigError, PrecisionCapError

Rational = Union[int, Fraction]

HARD_CAP_BITS = 8192


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n = s*s*r with r squarefree; returns (s, r). Requires n >= 0."""
    if n < 0:
        raise ValueError("need a nonnegative integer")
    if n in (0, 1):
        return 1, n
    s, r = 1, 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                r *= f
        f += 1 if f == 2 else 2
    return s, r * n


@lru_cache(maxsize=None)
def _sqrt_bracket(d: int, bits: int) -> int:
    """Integer s with s <= sqrt(d)*2**bits < s + 1."""
    return isqrt(d << (2 * bits))


class QuadraticSurd:
    """An element (a + b*sqrt(d))/c of a real quadratic field.

    Rational values are permitted (b = 0, d = 1) so that field arithmetic is
    closed; operations that require irrationality validate explicitly.
    """

    __slots__ = ("a", "b", "c", "d", "label")

    def __init__(self, a: int, b: int, d: int, c: int = 1, label: str | None = None):
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if d < 0:
            raise ValueError("only real quadratic fields are supported")
        s, r = squarefree_decompose(d)
        b, d = b * s, r
        if d in (0, 1):
            # the radical collapsed to an integer: fold it into a
            a, b, d = a + b * (1 if d == 1 else 0), 0, 1
        if b == 0:
            d = 1
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(a, b, c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticSurd is immutable")

    # -- basic structure ---------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def require_irrational(self, what: str = "value") -> "QuadraticSurd":
        if self.is_rational:
            raise ConfigError(f"{what} must be irrational, got {self}")
        return self

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not a rational value")
        return Fraction(self.a, self.c)

    def with_label(self, label: str) -> "QuadraticSurd":
        return QuadraticSurd(self.a, self.b, self.d, self.c, label=label)

    def __repr__(self) -> str:
        return f"QuadraticSurd({self})"

    def __str__(self) -> str:
        return f"({self.a}{self.b:+d}*sqrt({self.d}))/{self.c}"

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.c, self.d) == (
                other.a,
                other.b,
                other.c,
                other.d,
            )
        if isinstance(other, (int, Fraction)):
            return self.is_rational and Fraction(self.a, self.c) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    # -- arithmetic ---------------------------------------------------------

    def _parts(self, other) -> tuple[int, int, int, int] | None:
        """Coerce other into (a, b, c) over a common field; None if foreign."""
        if isinstance(other, QuadraticSurd):
            if self.b and other.b and self.d != other.d:
                raise ValueError(
                    f"cannot mix sqrt({self.d}) with sqrt({other.d}) exactly"
                )
            d = self.d if self.b else other.d
            return other.a, other.b, other.c, d
        if isinstance(other, int):
            return other, 0, 1, self.d
        if isinstance(other, Fraction):
            return other.numerator, 0, other.denominator, self.d
        return None

    def __add__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        a2, b2, c2, d = parts
        return QuadraticSurd(
            self.a * c2 + a2 * self.c, self.b * c2 + b2 * self.c, d, self.c * c2
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d, self.c)

    def __sub__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        a2, b2, c2, d = parts
        return QuadraticSurd(
            self.a * c2 - a2 * self.c, self.b * c2 - b2 * self.c, d, self.c * c2
        )

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        a2, b2, c2, d = parts
        return QuadraticSurd(
            self.a * a2 + self.b * b2 * d,
            self.a * b2 + self.b * a2,
            d,
            self.c * c2,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        if self.is_rational:
            if self.a == 0:
                raise ZeroDivisionError("inverse of zero")
            return QuadraticSurd(self.c, 0, 1, self.a)
        # 1/((a+b*sqrt(d))/c) = c*(a-b*sqrt(d))/(a^2-b^2 d); the norm is
        # nonzero because d is squarefree and b != 0
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadraticSurd(self.c * self.a, -self.c * self.b, self.d, norm)

    def __truediv__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        if isinstance(other, QuadraticSurd):
            return self * other.inverse()
        q = Fraction(other)
        return self * Fraction(q.denominator, q.numerator)

    def __rtruediv__(self, other):
        inv = self.inverse()
        return inv * other

    # -- order --------------------------------------------------------------

    def sign(self) -> int:
        a, b = self.a, self.b  # denominator is positive
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 against b^2 d (never equal: d squarefree)
        lhs, rhs = a * a, b * b * self.d
        if a > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def _cmp(self, other) -> int:
        diff = self - other
        if diff is NotImplemented:
            raise TypeError(f"cannot compare QuadraticSurd with {type(other)}")
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- enclosures and integer geometry -------------------------------------

    def enclosure(self, bits: int) -> Enclosure:
        """Certified dyadic enclosure of width |b|/(c*2**bits)."""
        if self.b == 0:
            return Enclosure.point(Fraction(self.a, self.c))
        s = _sqrt_bracket(self.d, bits)
        scale = 1 << bits
        if self.b > 0:
            lo_num = self.a * scale + self.b * s
            hi_num = self.a * scale + self.b * (s + 1)
        else:
            lo_num = self.a * scale + self.b * (s + 1)
            hi_num = self.a * scale + self.b * s
        den = self.c * scale
        return Enclosure(Fraction(lo_num, den), Fraction(hi_num, den))

    def refined(self, tol: Rational) -> Enclosure:
        """Enclosure of width at most tol, escalating precision adaptively."""
        return refine(self.enclosure, tol)

    def __float__(self) -> float:
        return float(self.enclosure(96).mid)

    def __floor__(self) -> int:
        if self.b == 0:
            return Fraction(self.a, self.c).__floor__()
        bits = 64
        while True:
            enc = self.enclosure(bits)
            lo, hi = enc.lo.__floor__(), enc.hi.__floor__()
            if lo == hi:
                return lo
            if bits >= HARD_CAP_BITS:
                raise PrecisionCapError(f"floor of {self} unresolved at hard cap")
            bits *= 2

    def frac(self) -> "QuadraticSurd":
        return self - self.__floor__()

    def nearest_int(self) -> int:
        """Nearest integer; exact, and tie-free for irrational values.

        Rational inputs sitting exactly on a half-integer round down.
        """
        m = self.__floor__()
        rem = self - m
        if (rem + rem - 1).sign() > 0:
            return m + 1
        return m

    def dist_to_int(self) -> "QuadraticSurd":
        """Distance to the nearest integer, an exact value in [0, 1/2]."""
        return abs(self - self.nearest_int())


def sqrt_int(d: int, label: str | None = None) -> QuadraticSurd:
    """The surd sqrt(d) for a nonsquare positive integer d."""
    return QuadraticSurd(0, 1, d, 1, label=label).require_irrational("sqrt argument")


_SURD_BODY = re.compile(
    r"""^
    (?:(?P<a>[+-]?\d+)\s*(?P<bsign>[+-])|(?P<lonesign>[+-])?)\s*
    (?:(?P<b>\d+)\s*\*\s*)?
    sqrt\(\s*(?P<d>\d+)\s*\)
    $""",
    re.VERBOSE,
)


def parse_surd(text: str, label: str | None = None) -> QuadraticSurd:
    """Parse "(a+b*sqrt(d))/c" (parens and /c optional) into an exact surd.

    The integer part, the explicit coefficient and the denominator may be
    omitted; d must not be a perfect square and the sqrt coefficient must be
    nonzero, so the parsed value is guaranteed irrational.
    """
    s = text.strip().replace(" ", "")
    c = 1
    if s.startswith("("):
        close = s.rfind(")")
        if close < 0:
            raise ConfigError(f"unbalanced parentheses in {text!r}")
        body, rest = s[1:close], s[close + 1 :]
        if rest:
            if not rest.startswith("/"):
                raise ConfigError(f"unexpected trailing {rest!r} in {text!r}")
            try:
                c = int(rest[1:])
            except ValueError:
                raise ConfigError(f"bad denominator in {text!r}") from None
    else:
        body = s
    m = _SURD_BODY.match(body)
    if m is None:
        raise ConfigError(
            f"cannot parse {text!r}; expected the form (a+b*sqrt(d))/c"
        )
    a = int(m.group("a")) if m.group("a") else 0
    sign = -1 if (m.group("bsign") or m.group("lonesign")) == "-" else 1
    b = sign * (int(m.group("b")) if m.group("b") else 1)
    d = int(m.group("d"))
    if b == 0:
        raise ConfigError(f"zero sqrt coefficient in {text!r} gives a rational")
    value = QuadraticSurd(a, b, d, c, label=label)
    if value.is_rational:
        raise ConfigError(f"{text!r} reduces to a rational: d is a perfect square")
    return value


class FixedPointReducer:
    """Fast evaluation of frac(k*x) and of the distance from k*x to Z.

    Precomputes X with |X - frac(x)*2**bits| < 1; then (k*X) mod 2**bits
    tracks frac(k*x)*2**bits within k + 1. Results feed float64 kernels, so
    they stay certified-accurate for |k| up to about 2**(bits-80).
    """

    def __init__(self, x: QuadraticSurd, bits: int = 192):
        self.bits = bits
        self.mask = (1 << bits) - 1
        fr = x.frac()
        enc = refine(fr.enclosure, Fraction(1, 1 << (bits + 8)))
        self.X = round(enc.mid * (1 << bits))
        self.max_k = 1 << (bits - 80)

    def frac_fixed(self, k: int) -> int:
        return (k * self.X) & self.mask

    def frac_float(self, k: int) -> float:
        """frac(k*x) in [0, 1); near the wrap the value may alias 1-eps vs eps,
        which is harmless for periodic consumers such as exp(2*pi*i*.)"""
        return math.ldexp(float(self.frac_fixed(k)), -self.bits)

    def dist_fixed(self, k: int) -> int:
        t = self.frac_fixed(k)
        return min(t, (1 << self.bits) - t)

    def dist_float(self, k: int) -> float:
        """Distance from k*x to the nearest integer, as a float64."""
        return math.ldexp(float(self.dist_fixed(k)), -self.bits)
