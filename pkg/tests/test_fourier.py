"""Tests for sparse Fourier series and rotation-operator workflows.

Oracles here are independent high-precision recomputations: phases through
mpmath.expjpi at 60 digits from the surd's own radical, ergodic sums through
literal term-by-term summation of the geometric series. The module under test
never sees these code paths.
"""

import io
import math
from fractions import Fraction

import mpmath
import pytest

from coblab.fourier import (
    SparseFourierSeries,
    apply_difference,
    apply_rotation,
    browder_sum_norm,
    coefficient_magnitude_enclosure,
    divisor_enclosure,
    double_ergodic_sum_norm,
    double_solve,
    mpf_to_fraction,
    random_real_series,
    solve_coboundary,
    transfer_coefficients,
    unit_phase,
)
from coblab.surd import parse_surd

ALPHA = parse_surd("(-1+1*sqrt(2))/1", label="alpha")
BETA = parse_surd("(-1+1*sqrt(3))/1", label="beta")


def surd_mpf(s):
    """High-precision float of a quadratic surd, recomputed from its parts."""
    return (mpmath.mpf(s.a) + mpmath.mpf(s.b) * mpmath.sqrt(s.d)) / s.c


def phase_oracle(x, n):
    """e(n*x) at the ambient mpmath precision."""
    return mpmath.expjpi(2 * n * surd_mpf(x))


def max_abs_coeff_diff(f, g):
    worst = mpmath.mpf(0)
    for n in set(f.support) | set(g.support):
        worst = max(worst, abs(f.coeff(n) - g.coeff(n)))
    return worst


# ---------------------------------------------------------------------------
# exact dyadic conversion


def test_mpf_to_fraction_simple():
    assert mpf_to_fraction(mpmath.mpf("0.375")) == Fraction(3, 8)
    assert mpf_to_fraction(mpmath.mpf(-3) / 2) == Fraction(-3, 2)
    assert mpf_to_fraction(mpmath.mpf(0)) == 0
    assert mpf_to_fraction(mpmath.mpf(7)) == 7


def test_mpf_to_fraction_roundtrip_floats():
    values = [0.1, -2.7335, 1e-12, 123456.75, -0.0]
    for v in values:
        assert float(mpf_to_fraction(mpmath.mpf(v))) == v


def test_mpf_to_fraction_rejects_nonfinite():
    with pytest.raises(ValueError):
        mpf_to_fraction(mpmath.inf)
    with pytest.raises(ValueError):
        mpf_to_fraction(mpmath.nan)


# ---------------------------------------------------------------------------
# series container


def test_constructor_drops_exact_zeros():
    f = SparseFourierSeries({1: 0.5, 2: 0.0, -3: 1j})
    assert f.support == (-3, 1)
    assert len(f) == 2
    assert f.coeff(2) == 0
    assert f.coeff(99) == 0


def test_series_is_immutable():
    f = SparseFourierSeries({1: 1.0})
    with pytest.raises(AttributeError):
        f.real_valued = True


def test_real_valued_validation():
    SparseFourierSeries({1: 0.5 + 0.25j, -1: 0.5 - 0.25j}, real_valued=True)
    SparseFourierSeries({0: 2.0}, real_valued=True)
    with pytest.raises(ValueError):
        SparseFourierSeries({1: 0.5 + 0.25j, -1: 0.5 + 0.25j}, real_valued=True)
    with pytest.raises(ValueError):
        SparseFourierSeries({1: 1.0}, real_valued=True)
    with pytest.raises(ValueError):
        SparseFourierSeries({0: 1j}, real_valued=True)


def test_algebra_matches_dict_arithmetic():
    f = SparseFourierSeries({1: 1.0 + 1j, 2: -0.5})
    g = SparseFourierSeries({2: 0.5, 3: 2j})
    s = f + g
    assert s.support == (1, 3)
    assert s.coeff(1) == f.coeff(1)
    assert s.coeff(2) == 0
    d = f - g
    assert d.coeff(2) == mpmath.mpc(-1.0)
    h = f.scale(2)
    assert h.coeff(1) == mpmath.mpc(2, 2)


def test_scale_with_complex_factor_drops_real_flag():
    f = SparseFourierSeries({1: 1j, -1: -1j}, real_valued=True)
    assert f.scale(0.5).real_valued
    assert not f.scale(1j).real_valued


def test_centered_checks():
    f = SparseFourierSeries({0: 1.0, 1: 1.0})
    assert not f.is_centered()
    with pytest.raises(ValueError):
        f.require_centered()
    assert SparseFourierSeries({1: 1.0}).is_centered()


def test_norms_exact_and_float():
    f = SparseFourierSeries({1: 0.5, -1: 0.5, 3: 0.25j})
    assert f.l2_norm_sq_exact() == Fraction(1, 4) + Fraction(1, 4) + Fraction(1, 16)
    assert f.l2_norm() == pytest.approx(math.sqrt(9 / 16), rel=1e-15)
    assert f.l1_norm() == pytest.approx(1.25, rel=1e-15)


# ---------------------------------------------------------------------------
# phases and rotations


@pytest.mark.parametrize("n", [1, 2, 7, 164, 24695, 652982, -3, -57649])
def test_unit_phase_matches_oracle(n):
    with mpmath.workdps(60):
        expected = phase_oracle(ALPHA, n)
        got = unit_phase(ALPHA, n)
        assert abs(got - expected) < mpmath.mpf("1e-35")
        assert abs(abs(got) - 1) < mpmath.mpf("1e-37")


def test_unit_phase_conjugate_symmetry_exact():
    # compare at working precision so conj itself does not round
    with mpmath.mp.workprec(160):
        for n in (1, 5, 1183):
            assert unit_phase(ALPHA, -n) == mpmath.conj(unit_phase(ALPHA, n))


def test_apply_rotation_matches_oracle_and_preserves_norm():
    f = random_real_series(seed=7, max_freq=8)
    rotated = apply_rotation(f, ALPHA)
    with mpmath.workdps(60):
        for n, c in f.items():
            expected = c * phase_oracle(ALPHA, n)
            assert abs(rotated.coeff(n) - expected) < mpmath.mpf("1e-34")
    assert rotated.real_valued
    assert rotated.l2_norm() == pytest.approx(f.l2_norm(), rel=1e-13)


def test_apply_rotation_requires_irrational():
    f = SparseFourierSeries({1: 1.0})
    from coblab.errors import ConfigError
    from coblab.surd import QuadraticSurd

    with pytest.raises(ConfigError):
        apply_rotation(f, QuadraticSurd(1, 0, 2))


def test_apply_difference_consistency():
    f = random_real_series(seed=11, max_freq=5)
    direct = apply_difference(f, ALPHA)
    composed = f - apply_rotation(f, ALPHA)
    assert max_abs_coeff_diff(direct, composed) < mpmath.mpf("1e-36")
    assert direct.real_valued


# ---------------------------------------------------------------------------
# coboundary solves


def test_solve_coboundary_identity_and_report():
    f = random_real_series(seed=3, max_freq=6)
    g, report = solve_coboundary(f, ALPHA)
    back = apply_difference(g, ALPHA)
    assert max_abs_coeff_diff(back, f) < mpmath.mpf("1e-34")
    assert g.real_valued
    assert not report.contains_zero
    assert [e.n for e in report.entries] == list(f.support)
    with mpmath.workdps(60):
        a = surd_mpf(ALPHA)
        for entry in report.entries:
            dist = abs(entry.n * a - mpmath.nint(entry.n * a))
            oracle_div = 2 * mpmath.sin(mpmath.pi * dist)
            assert entry.divisor.lo > 0
            assert mpf_to_fraction(mpmath.mpf(oracle_div)) in entry.divisor or (
                abs(float(entry.divisor.mid) - float(oracle_div)) < 1e-16
            )
            oracle_mag = abs(f.coeff(entry.n)) / oracle_div
            assert float(entry.magnitude.lo) <= float(oracle_mag) * (1 + 1e-12)
            assert float(entry.magnitude.hi) >= float(oracle_mag) * (1 - 1e-12)
    assert report.smallest_divisor() > 0


def test_solve_coboundary_rejects_uncentered():
    f = SparseFourierSeries({0: 1.0, 1: 1.0})
    with pytest.raises(ValueError):
        solve_coboundary(f, ALPHA)


def test_divisor_enclosure_oracle_tightness():
    with mpmath.workdps(60):
        a = surd_mpf(ALPHA)
        for n in (1, 2, 12, 57649):
            enc = divisor_enclosure(ALPHA, n)
            dist = abs(n * a - mpmath.nint(n * a))
            oracle = 2 * mpmath.sin(mpmath.pi * dist)
            assert enc.lo > 0
            assert float(enc.lo) <= float(oracle) <= float(enc.hi) * (1 + 1e-18)
            assert float(enc.width) < 1e-12
    with pytest.raises(ValueError):
        divisor_enclosure(ALPHA, 0)


def test_coefficient_magnitude_enclosure():
    c = mpmath.mpc(3, 4)
    enc = coefficient_magnitude_enclosure(c)
    assert Fraction(5) in enc
    assert float(enc.width) < 1e-30


def test_transfer_identity():
    f = random_real_series(seed=19, max_freq=5)
    g = transfer_coefficients(f, ALPHA, BETA)
    lhs = apply_difference(g, BETA)
    rhs = apply_difference(f, ALPHA)
    assert max_abs_coeff_diff(lhs, rhs) < mpmath.mpf("1e-33")
    assert g.real_valued


def test_double_solve_identity_and_report():
    f = random_real_series(seed=23, max_freq=4)
    h, report = double_solve(f, ALPHA, BETA)
    back = apply_difference(apply_difference(h, ALPHA), BETA)
    assert max_abs_coeff_diff(back, f) < mpmath.mpf("1e-33")
    assert not report.contains_zero
    with mpmath.workdps(60):
        a = surd_mpf(ALPHA)
        b = surd_mpf(BETA)
        for entry in report.entries:
            da = abs(entry.n * a - mpmath.nint(entry.n * a))
            db = abs(entry.n * b - mpmath.nint(entry.n * b))
            oracle = 4 * mpmath.sin(mpmath.pi * da) * mpmath.sin(mpmath.pi * db)
            assert float(entry.divisor.lo) <= float(oracle) * (1 + 1e-15)
            assert float(entry.divisor.hi) >= float(oracle) * (1 - 1e-15)


# ---------------------------------------------------------------------------
# ergodic sums


def brute_double_norm(f, x, y, n, m, dps=50):
    """Literal double sum of rotated copies, then the Parseval norm."""
    with mpmath.workdps(dps):
        a = surd_mpf(x)
        b = surd_mpf(y)
        total = mpmath.mpf(0)
        for nu, c in f.items():
            s_a = mpmath.fsum(mpmath.expjpi(2 * k * nu * a) for k in range(n))
            s_b = mpmath.fsum(mpmath.expjpi(2 * j * nu * b) for j in range(m))
            total += abs(c * s_a * s_b) ** 2
        return float(mpmath.sqrt(total))


def brute_single_norm(f, x, n, dps=50):
    with mpmath.workdps(dps):
        a = surd_mpf(x)
        total = mpmath.mpf(0)
        for nu, c in f.items():
            s = mpmath.fsum(mpmath.expjpi(2 * k * nu * a) for k in range(n))
            total += abs(c * s) ** 2
        return float(mpmath.sqrt(total))


@pytest.mark.parametrize("seed,n,m", [(0, 1, 1), (1, 2, 3), (2, 5, 4), (3, 32, 17)])
def test_double_ergodic_sum_norm_against_bruteforce(seed, n, m):
    f = random_real_series(seed=seed, max_freq=6)
    got = double_ergodic_sum_norm(f, ALPHA, BETA, n, m)
    expected = brute_double_norm(f, ALPHA, BETA, n, m)
    assert got == pytest.approx(expected, rel=1e-11)


def test_double_ergodic_sum_norm_constant_mode():
    f = SparseFourierSeries({0: 1.0})
    assert double_ergodic_sum_norm(f, ALPHA, BETA, 7, 9) == pytest.approx(63.0)


def test_double_ergodic_sum_norm_validates_lengths():
    f = SparseFourierSeries({1: 1.0})
    with pytest.raises(ValueError):
        double_ergodic_sum_norm(f, ALPHA, BETA, 0, 5)


@pytest.mark.parametrize("seed,n", [(4, 1), (5, 7), (6, 100)])
def test_browder_sum_norm_against_bruteforce(seed, n):
    f = random_real_series(seed=seed, max_freq=6)
    got = browder_sum_norm(f, ALPHA, n)
    expected = brute_single_norm(f, ALPHA, n)
    assert got == pytest.approx(expected, rel=1e-11)


def test_browder_sum_norm_large_frequency():
    # exact argument reduction keeps kernels accurate at desk-scale products
    f = SparseFourierSeries({652982: 1.0})
    got = browder_sum_norm(f, ALPHA, 1000)
    expected = brute_single_norm(f, ALPHA, 1000, dps=80)
    assert got == pytest.approx(expected, rel=1e-9)


# ---------------------------------------------------------------------------
# serialization


def test_csv_roundtrip():
    f = random_real_series(seed=31, max_freq=4)
    buf = io.StringIO()
    f.to_csv(buf)
    buf.seek(0)
    g = SparseFourierSeries.from_csv(buf, real_valued=True)
    assert max_abs_coeff_diff(f, g) < mpmath.mpf("1e-33")
    assert g.real_valued


def test_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        SparseFourierSeries.from_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_json_roundtrip_preserves_flag():
    f = random_real_series(seed=37, max_freq=3)
    g = SparseFourierSeries.from_json(f.to_json())
    assert g.real_valued
    assert max_abs_coeff_diff(f, g) < mpmath.mpf("1e-33")
    h = SparseFourierSeries({2: 1j})
    assert not SparseFourierSeries.from_json(h.to_json()).real_valued


# ---------------------------------------------------------------------------
# deterministic random inputs


def test_random_real_series_deterministic_and_normalized():
    f = random_real_series(seed=42, max_freq=10)
    g = random_real_series(seed=42, max_freq=10)
    assert max_abs_coeff_diff(f, g) == 0
    assert f.support == tuple(range(-10, 0)) + tuple(range(1, 11))
    assert f.l2_norm() == pytest.approx(1.0, abs=1e-12)
    assert f.real_valued
    assert f.is_centered()


def test_random_real_series_uncentered_variant():
    f = random_real_series(seed=1, max_freq=2, centered=False, unit_l2=False)
    assert 0 in f.support
    assert mpmath.im(f.coeff(0)) == 0


def test_random_series_differ_across_seeds():
    f = random_real_series(seed=0, max_freq=5)
    g = random_real_series(seed=1, max_freq=5)
    assert max_abs_coeff_diff(f, g) > 0
