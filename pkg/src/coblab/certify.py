"""Certified enclosures built from integer arithmetic with directed rounding.

Every bound produced here is sound by construction: square roots come from
``math.isqrt`` brackets, pi from the Machin arctangent formula with
alternating-series truncation, sin from alternating Taylor brackets, log from
the atanh series with an explicit geometric remainder, exp from Taylor with
scaled squaring. No floating point enters any certified path, which keeps
these routines fully independent of the high-precision decimal oracles used
in the test suite.

Precision escalates adaptively: computations start at START_BITS and double
until the requested width is met, up to HARD_CAP_BITS.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Callable, Union

from .errors import PrecisionCapError

START_BITS = 128
HARD_CAP_BITS = 8192

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class Enclosure:
    """A closed rational interval [lo, hi] certified to contain a value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure: {self.lo} > {self.hi}")

    @classmethod
    def point(cls, value: Rational) -> "Enclosure":
        v = Fraction(value)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def __contains__(self, value: Rational) -> bool:
        return self.lo <= Fraction(value) <= self.hi

    def contains_enclosure(self, other: "Enclosure") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other: "Enclosure | Rational") -> "Enclosure":
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi)
        q = Fraction(other)
        return Enclosure(self.lo + q, self.hi + q)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other: "Enclosure | Rational") -> "Enclosure":
        if isinstance(other, Enclosure):
            return self + (-other)
        return self + (-Fraction(other))

    def __mul__(self, other: "Enclosure | Rational") -> "Enclosure":
        if isinstance(other, Enclosure):
            products = (
                self.lo * other.lo,
                self.lo * other.hi,
                self.hi * other.lo,
                self.hi * other.hi,
            )
            return Enclosure(min(products), max(products))
        q = Fraction(other)
        if q >= 0:
            return Enclosure(self.lo * q, self.hi * q)
        return Enclosure(self.hi * q, self.lo * q)

    __rmul__ = __mul__

    def __truediv__(self, other: "Enclosure | Rational") -> "Enclosure":
        if isinstance(other, Enclosure):
            # Only division by intervals bounded away from 0 arises here.
            if other.lo <= 0:
                raise ZeroDivisionError(
                    "division requires a strictly positive divisor enclosure"
                )
            return self * Enclosure(1 / other.hi, 1 / other.lo)
        q = Fraction(other)
        if q == 0:
            raise ZeroDivisionError("division by exact zero")
        return self * (1 / q)

    def square(self) -> "Enclosure":
        """Interval square, tight also when the interval straddles 0."""
        a, b = self.lo * self.lo, self.hi * self.hi
        lo = Fraction(0) if self.lo < 0 < self.hi else min(a, b)
        return Enclosure(lo, max(a, b))

    def intersect(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(max(self.lo, other.lo), min(self.hi, other.hi))

    def strictly_below(self, other: "Enclosure | Rational") -> bool:
        if isinstance(other, Enclosure):
            return self.hi < other.lo
        return self.hi < Fraction(other)

    def strictly_above(self, other: "Enclosure | Rational") -> bool:
        if isinstance(other, Enclosure):
            return self.lo > other.hi
        return self.lo > Fraction(other)

    def rounded(self, bits: int) -> "Enclosure":
        """Round endpoints outward onto the 2**-bits dyadic grid.

        Keeps denominators bounded at the cost of at most 2**-bits of extra
        width per endpoint; used to stop exact Fractions from snowballing.
        """
        scale = 1 << bits
        lo = Fraction(_floor_scaled(self.lo, scale), scale)
        hi = Fraction(_ceil_scaled(self.hi, scale), scale)
        return Enclosure(lo, hi)


def _floor_scaled(x: Fraction, scale: int) -> int:
    return (x.numerator * scale) // x.denominator


def _ceil_scaled(x: Fraction, scale: int) -> int:
    return -((-x.numerator * scale) // x.denominator)


def hull(a: Enclosure, b: Enclosure) -> Enclosure:
    return Enclosure(min(a.lo, b.lo), max(a.hi, b.hi))


def max_enclosure(a: Enclosure, b: Enclosure) -> Enclosure:
    return Enclosure(max(a.lo, b.lo), max(a.hi, b.hi))


def min_enclosure(a: Enclosure, b: Enclosure) -> Enclosure:
    return Enclosure(min(a.lo, b.lo), min(a.hi, b.hi))


def refine(
    producer: Callable[[int], Enclosure],
    width_goal: Rational,
    *,
    start: int = START_BITS,
    cap: int = HARD_CAP_BITS,
) -> Enclosure:
    """Call producer(bits) with doubling precision until the width goal holds."""
    goal = Fraction(width_goal)
    if goal <= 0:
        raise ValueError("width goal must be positive")
    bits = start
    while True:
        enc = producer(bits)
        if enc.width <= goal:
            return enc
        if bits >= cap:
            raise PrecisionCapError(
                f"width {float(enc.width):.3e} above goal {float(goal):.3e} "
                f"at the {cap}-bit hard cap"
            )
        bits = min(2 * bits, cap)


def separate(
    prod_a: Callable[[int], Enclosure],
    prod_b: Callable[[int], Enclosure],
    *,
    start: int = START_BITS,
    cap: int = HARD_CAP_BITS,
) -> int:
    """Return -1 if a < b certified, +1 if a > b, escalating until disjoint.

    Callers must only compare values that cannot be equal (e.g. quantities
    lying in distinct quadratic fields); equality burns through the cap.
    """
    bits = start
    while True:
        a, b = prod_a(bits), prod_b(bits)
        if a.hi < b.lo:
            return -1
        if b.hi < a.lo:
            return 1
        if bits >= cap:
            raise PrecisionCapError("enclosures still overlap at the hard cap")
        bits = min(2 * bits, cap)


# ---------------------------------------------------------------------------
# square roots


def sqrt_enclosure(x: Rational, bits: int) -> Enclosure:
    """Enclosure of sqrt(x) for rational x >= 0, width below 2**-bits·x^(1/2)·ulp."""
    q = Fraction(x)
    if q < 0:
        raise ValueError("sqrt of a negative rational")
    if q == 0:
        return Enclosure.point(0)
    # sqrt(p/q) = sqrt(p*q)/q, bracketed by isqrt on p*q*4**bits.
    n = q.numerator * q.denominator
    s = isqrt(n << (2 * bits))
    den = q.denominator << bits
    return Enclosure(Fraction(s, den), Fraction(s + 1, den))


def inv_sqrt_enclosure(n: int, bits: int) -> Enclosure:
    """Enclosure of n**(-1/2) for a positive integer n."""
    if n <= 0:
        raise ValueError("need a positive integer")
    return sqrt_enclosure(Fraction(1, n), bits)


# ---------------------------------------------------------------------------
# pi


def _arctan_inv(m: int, bits: int) -> Enclosure:
    """Alternating-series enclosure of arctan(1/m) for integer m >= 2."""
    guard = bits + 8
    total = Fraction(0)
    k = 0
    power = Fraction(1, m)  # (1/m)**(2k+1)
    m2 = m * m
    while True:
        term = power / (2 * k + 1)
        if term.numerator.bit_length() + guard < term.denominator.bit_length():
            # term < 2**-guard: bracket by one further alternating step
            if k % 2 == 0:
                return Enclosure(total, total + term)
            return Enclosure(total - term, total)
        total = total + term if k % 2 == 0 else total - term
        power = power / m2
        k += 1


@lru_cache(maxsize=None)
def pi_enclosure(bits: int) -> Enclosure:
    """Machin: pi = 16*arctan(1/5) - 4*arctan(1/239)."""
    a5 = _arctan_inv(5, bits + 6)
    a239 = _arctan_inv(239, bits + 6)
    lo = 16 * a5.lo - 4 * a239.hi
    hi = 16 * a5.hi - 4 * a239.lo
    return Enclosure(lo, hi).rounded(bits + 2)


# ---------------------------------------------------------------------------
# sin on [0, pi/2]


def _sin_taylor(t: Fraction, bits: int) -> Enclosure:
    """Alternating Taylor bracket of sin(t) for rational t in [0, 2]."""
    if t == 0:
        return Enclosure.point(0)
    if not 0 < t <= 2:
        raise ValueError("sin bracket only supports arguments in [0, 2]")
    guard_scale = 1 << (bits + 8)
    total = Fraction(0)
    term = t
    t2 = t * t
    k = 0
    while True:
        if term.denominator > term.numerator * guard_scale:
            if k % 2 == 0:
                enc = Enclosure(total, total + term)
            else:
                enc = Enclosure(total - term, total)
            return enc.rounded(bits + 4)
        total = total + term if k % 2 == 0 else total - term
        k += 1
        # terms strictly decrease for t <= 2 since (2k)(2k+1) >= 6 > t*t
        term = term * t2 / ((2 * k) * (2 * k + 1))


def sin_pi_enclosure(x: Enclosure, bits: int) -> Enclosure:
    """Enclosure of sin(pi*x) for an enclosure x inside [0, 1/2].

    Monotone on the quarter period, so endpoint brackets suffice; if the
    scaled upper endpoint may cross pi/2 the upper bound falls back to 1.
    """
    if x.lo < 0 or x.hi > Fraction(1, 2):
        raise ValueError("argument enclosure must lie inside [0, 1/2]")
    pi = pi_enclosure(bits + 6)
    lo_arg = pi.lo * x.lo
    hi_arg = pi.hi * x.hi
    lower = _sin_taylor(_round_down(lo_arg, bits + 8), bits + 6).lo
    if hi_arg <= pi.lo / 2:
        upper = _sin_taylor(_round_up(hi_arg, bits + 8), bits + 6).hi
        upper = min(upper, Fraction(1))
    else:
        # x.hi at or next to 1/2: sin(pi*x.hi) is within ulp of 1
        upper = Fraction(1)
    lower = max(lower, Fraction(0))
    return Enclosure(lower, upper)


def _round_down(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(_floor_scaled(x, scale), scale)


def _round_up(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(_ceil_scaled(x, scale), scale)


# ---------------------------------------------------------------------------
# log and exp


def _atanh_series(t: Fraction, bits: int) -> Enclosure:
    """Enclosure of atanh(t) for rational 0 <= t <= 1/2 (positive series)."""
    if t == 0:
        return Enclosure.point(0)
    if not 0 < t <= Fraction(1, 2):
        raise ValueError("atanh series only supports t in [0, 1/2]")
    goal = Fraction(1, 1 << (bits + 6))
    one_minus = 1 - t * t
    total = Fraction(0)
    power = t
    k = 0
    while True:
        term = power / (2 * k + 1)
        remainder = power * t * t / ((2 * k + 3) * one_minus)
        if remainder <= goal:
            total += term
            return Enclosure(total, total + remainder).rounded(bits + 4)
        total += term
        power = power * t * t
        k += 1


@lru_cache(maxsize=None)
def _ln2(bits: int) -> Enclosure:
    return 2 * _atanh_series(Fraction(1, 3), bits + 2)


def _floor_log2(x: Fraction) -> int:
    e = x.numerator.bit_length() - x.denominator.bit_length()
    while _pow2_cmp(x, e) < 0:
        e -= 1
    while _pow2_cmp(x, e + 1) >= 0:
        e += 1
    return e


def _pow2_cmp(x: Fraction, e: int) -> int:
    """Sign of x - 2**e via integer cross-multiplication."""
    if e >= 0:
        lhs, rhs = x.numerator, x.denominator << e
    else:
        lhs, rhs = x.numerator << (-e), x.denominator
    return (lhs > rhs) - (lhs < rhs)


def log_enclosure(y: Rational, bits: int) -> Enclosure:
    """Enclosure of the natural log of a positive rational."""
    q = Fraction(y)
    if q <= 0:
        raise ValueError("log of a nonpositive rational")
    if q == 1:
        return Enclosure.point(0)
    e = _floor_log2(q)
    m = q / Fraction(2) ** e  # in [1, 2)
    t = (m - 1) / (m + 1)  # in [0, 1/3)
    body = 2 * _atanh_series(t, bits + 4)
    ln2 = _ln2(bits + 4)
    return (body + e * ln2).rounded(bits + 2)


def exp_enclosure(u: Rational, bits: int) -> Enclosure:
    """Enclosure of exp(u) for rational u via Taylor plus scaled squaring."""
    q = Fraction(u)
    if q == 0:
        return Enclosure.point(1)
    if q < 0:
        pos = exp_enclosure(-q, bits + 4)
        return Enclosure(1 / pos.hi, 1 / pos.lo).rounded(bits + 2)
    halvings = 0
    w = q
    while w > Fraction(1, 2):
        halvings += 1
        w = q / (1 << halvings)
    guard = bits + 2 * halvings + 10
    goal = Fraction(1, 1 << guard)
    total = Fraction(1)
    term = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * w / k
        # for w <= 1/2 the Taylor tail is below twice the next term
        if 2 * term <= goal:
            enc = Enclosure(total, total + 2 * term)
            break
        total += term
    for _ in range(halvings):
        enc = Enclosure(enc.lo * enc.lo, enc.hi * enc.hi).rounded(guard)
    return enc.rounded(bits + 2)


def pow_enclosure(n: int, exponent: Rational, bits: int) -> Enclosure:
    """Enclosure of n**exponent for integer n >= 1 and rational exponent."""
    if n < 1:
        raise ValueError("base must be a positive integer")
    if n == 1:
        return Enclosure.point(1)
    expo = Fraction(exponent)
    if expo == 0:
        return Enclosure.point(1)
    ln_n = log_enclosure(n, bits + 8)
    w = ln_n * expo
    lower = exp_enclosure(w.lo, bits + 4).lo
    upper = exp_enclosure(w.hi, bits + 4).hi
    return Enclosure(max(lower, Fraction(0)), upper)
