"""Exactness tests for quadratic-surd arithmetic against an mpmath oracle."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coblab.errors import ConfigError
from coblab.surd import (
    FixedPointReducer,
    QuadraticSurd,
    parse_surd,
    sqrt_int,
    squarefree_decompose,
)


def oracle_value(x, dps=200):
    """Independent high-precision float of (a + b*sqrt(d))/c."""
    with mpmath.workdps(dps):
        return (x.a + x.b * mpmath.sqrt(x.d)) / x.c


ALPHA = parse_surd("(-1+1*sqrt(2))/1")  # sqrt(2) - 1
BETA = parse_surd("(-1+1*sqrt(3))/1")  # sqrt(3) - 1
GOLDEN = parse_surd("(1+sqrt(5))/2")


def test_squarefree_decompose():
    assert squarefree_decompose(1) == (1, 1)
    assert squarefree_decompose(8) == (2, 2)
    assert squarefree_decompose(360) == (6, 10)
    assert squarefree_decompose(49) == (7, 1)
    assert squarefree_decompose(97) == (1, 97)


def test_canonical_form():
    x = QuadraticSurd(2, 4, 8, -6)
    # 4*sqrt(8) = 8*sqrt(2); gcd and sign normalize to (-1-4*sqrt(2))/3
    assert (x.a, x.b, x.c, x.d) == (-1, -4, 3, 2)
    assert QuadraticSurd(3, 5, 4).is_rational  # sqrt(4) = 2 folds in
    assert QuadraticSurd(3, 5, 4) == 13


def test_parse_and_str_roundtrip():
    for text in ["(-1+1*sqrt(2))/1", "(1+2*sqrt(5))/3", "(2-3*sqrt(7))/5", "sqrt(2)", "-1+sqrt(2)"]:
        x = parse_surd(text)
        assert parse_surd(str(x)) == x


def test_parse_rejects_garbage():
    for bad in ["sqrt(4)", "(1+0*sqrt(2))/3", "1+2", "(1+sqrt(2)", "(1+sqrt(2))/0", "x"]:
        with pytest.raises((ConfigError, ZeroDivisionError)):
            parse_surd(bad)


def test_field_arithmetic_matches_oracle():
    x = (2 * ALPHA + 1) / 3
    assert float(x) == pytest.approx(float((2 * oracle_value(ALPHA) + 1) / 3), abs=1e-15)
    y = ALPHA * ALPHA - ALPHA / 2 + Fraction(7, 3)
    with mpmath.workdps(60):
        a = oracle_value(ALPHA, 60)
        expected = a * a - a / 2 + mpmath.mpf(7) / 3
    assert float(y) == pytest.approx(float(expected), abs=1e-15)


def test_cross_field_mixing_rejected():
    with pytest.raises(ValueError):
        ALPHA + BETA
    with pytest.raises(ValueError):
        ALPHA * BETA


def test_sign_and_comparisons():
    assert ALPHA.sign() == 1
    assert (-ALPHA).sign() == -1
    assert (ALPHA - ALPHA).sign() == 0
    assert ALPHA < Fraction(1, 2)
    assert ALPHA > Fraction(2, 5)
    assert GOLDEN > 1
    # a > 0, b < 0 branch: 3 - 2*sqrt(2) > 0 iff 9 > 8
    assert QuadraticSurd(3, -2, 2).sign() == 1
    assert QuadraticSurd(2, -2, 2).sign() == -1


def test_floor_and_frac():
    assert math.floor(GOLDEN) == 1
    assert math.floor(-GOLDEN) == -2
    assert math.floor(17 * ALPHA) == 7  # 17*(sqrt(2)-1) = 7.0416
    fr = (17 * ALPHA).frac()
    assert 0 < float(fr) < 1
    assert math.floor(QuadraticSurd(7, 0, 1, 2)) == 3


def test_nearest_int_and_distance():
    x = 8 * parse_surd("sqrt(2)")  # 11.3137
    assert x.nearest_int() == 11
    dist = x.dist_to_int()
    with mpmath.workdps(200):
        expected = 8 * mpmath.sqrt(2) - 11
        scaled = int(mpmath.floor(expected * mpmath.mpf(2) ** 150))
    enc = dist.refined(Fraction(1, 10**40))
    val = Fraction(scaled, 2**150)
    assert enc.lo <= val + Fraction(1, 2**140) and val - Fraction(1, 2**140) <= enc.hi


def test_enclosure_contains_and_width():
    enc = ALPHA.enclosure(128)
    with mpmath.workdps(200):
        v = oracle_value(ALPHA)
        scaled = int(mpmath.floor(v * mpmath.mpf(2) ** 150))
    bracket_lo = Fraction(scaled, 2**150)
    assert enc.lo <= bracket_lo + Fraction(1, 2**140)
    assert bracket_lo - Fraction(1, 2**140) <= enc.hi
    assert enc.width <= Fraction(1, 2**127)


def test_inverse_and_division():
    inv = ALPHA.inverse()
    assert inv * ALPHA == 1
    assert (GOLDEN / GOLDEN) == 1
    assert (1 / ALPHA) == inv
    # 1/(sqrt(2)-1) = sqrt(2)+1
    assert inv == QuadraticSurd(1, 1, 2)


def test_equality_hash_and_rational_interop():
    assert QuadraticSurd(6, 0, 1, 4) == Fraction(3, 2)
    assert hash(QuadraticSurd(6, 0, 1, 4)) == hash(Fraction(3, 2))
    assert QuadraticSurd(1, 1, 2) != QuadraticSurd(1, 1, 3)
    assert len({ALPHA, ALPHA + 0, BETA}) == 2


def test_labels_do_not_affect_identity():
    tagged = ALPHA.with_label("alpha")
    assert tagged == ALPHA
    assert tagged.label == "alpha"


@settings(max_examples=80, deadline=None)
@given(
    a=st.integers(-50, 50),
    b=st.integers(-20, 20),
    c=st.integers(1, 30),
    d=st.sampled_from([2, 3, 5, 6, 7, 10, 13]),
)
def test_arithmetic_identities_random(a, b, c, d):
    x = QuadraticSurd(a, b, d, c)
    y = QuadraticSurd(b - 1, a + 1, d, 7)
    assert (x + y) - y == x
    assert x + (-x) == 0
    if x.sign() != 0:
        assert x * x.inverse() == 1
    # floor correctness: floor <= x < floor + 1, checked exactly
    f = math.floor(x)
    assert (x - f).sign() >= 0 and (x - f - 1).sign() < 0


@settings(max_examples=50, deadline=None)
@given(k=st.integers(1, 10**6))
def test_fixed_point_reducer_matches_oracle(k):
    red = FixedPointReducer(ALPHA, bits=160)
    got = red.dist_float(k)
    with mpmath.workdps(60):
        t = mpmath.frac(k * (mpmath.sqrt(2) - 1))
        expected = float(min(t, 1 - t))
    assert got == pytest.approx(expected, abs=1e-14)


def test_fixed_point_reducer_frac_is_periodic_safe():
    red = FixedPointReducer(GOLDEN, bits=192)
    for k in (1, 2, 34, 6765):
        fr = red.frac_float(k)
        assert 0.0 <= fr < 1.0


def test_sqrt_int_validates():
    assert sqrt_int(2).d == 2
    with pytest.raises(ConfigError):
        sqrt_int(9)
