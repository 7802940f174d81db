"""Tests for the lattice shift example.

Oracles: closed forms evaluated with 50-digit mpmath (2**-3/2 for the
corner value, zeta(3/2) - 1 for the corner of the formal solution,
pi**2/6 - zeta(3) for the full l_2 mass), direct summation with ten times
more explicit terms, and exact harmonic-sum arithmetic for the divergence
floor.
"""

import io
from fractions import Fraction

import mpmath
import pytest

from coblab.errors import ConfigError
from coblab.shift_example import (
    build_h,
    build_q,
    divergence_certificate,
    lp_partial_norm,
    shift_grid_to_csv,
)


def _oracle(expr_digits):
    return Fraction(expr_digits)


def _contains(enc, digits: str) -> bool:
    return enc.lo <= Fraction(digits) <= enc.hi


class TestBuildH:
    def test_p2_is_power_three_halves(self):
        h = build_h(2)
        assert h.kind == "power"
        assert h.exponent == Fraction(3, 2)

    def test_corner_value_is_inverse_sqrt8(self):
        v = build_h(2).value(1, 1)
        with mpmath.workdps(50):
            oracle = mpmath.nstr(mpmath.mpf(2) ** mpmath.mpf("-1.5"), 40)
        assert _contains(v, oracle)
        assert v.width < Fraction(1, 10**25)

    def test_p1_switches_to_logpower(self):
        h = build_h(1)
        assert h.kind == "logpower"
        v = h.value(1, 1)
        with mpmath.workdps(50):
            oracle = mpmath.nstr(1 / (4 * mpmath.log(2) ** 2), 40)
        assert _contains(v, oracle)

    def test_values_depend_only_on_the_diagonal(self):
        h = build_h(3)
        assert h.value(1, 4) == h.value(2, 3) == h.value(4, 1)

    def test_rejects_p_below_one(self):
        with pytest.raises(ConfigError):
            build_h(Fraction(1, 2))

    def test_rejects_bad_indices(self):
        with pytest.raises(ConfigError):
            build_h(2).value(0, 3)


class TestLpPartialNorm:
    def test_p2_total_encloses_pi2_over_6_minus_zeta3(self):
        h = build_h(2)
        result = lp_partial_norm(h, 2, 2000, 2000)
        with mpmath.workdps(50):
            oracle = mpmath.nstr(mpmath.pi**2 / 6 - mpmath.zeta(3), 40)
        assert _contains(result.total, oracle)
        assert result.total.width < Fraction(1, 1000)

    def test_partial_matches_direct_box_summation(self):
        # Direct oracle: sum over the complete diagonals s <= 11 of
        # (s-1) s**-3, computed in exact rational arithmetic.
        h = build_h(2)
        result = lp_partial_norm(h, 2, 10, 10)
        direct = sum(Fraction(s - 1, s**3) for s in range(2, 12))
        assert result.partial.lo <= direct <= result.partial.hi
        assert result.partial.width < Fraction(1, 10**30)

    def test_tail_shrinks_with_the_box(self):
        h = build_h(2)
        small = lp_partial_norm(h, 2, 50, 50)
        large = lp_partial_norm(h, 2, 500, 500)
        assert large.tail.hi < small.tail.hi
        assert large.total.width < small.total.width

    def test_totals_nested_as_the_box_grows(self):
        h = build_h(2)
        small = lp_partial_norm(h, 2, 50, 50)
        large = lp_partial_norm(h, 2, 500, 500)
        assert small.total.lo <= large.total.lo
        assert large.total.hi <= small.total.hi

    def test_fractional_p_uses_enclosures(self):
        h = build_h(Fraction(5, 2))
        result = lp_partial_norm(h, Fraction(5, 2), 40, 40)
        # kappa = (7/5)(5/2) = 7/2; direct float check of the first terms.
        direct = sum((s - 1) * s**-3.5 for s in range(2, 42))
        assert abs(float(result.partial.mid) - direct) < 1e-12

    def test_logpower_total_is_finite_and_positive(self):
        h = build_h(1)
        result = lp_partial_norm(h, 1, 300, 300)
        direct = 0.0
        import math

        for s in range(2, 302):
            direct += (s - 1) / (s**2 * math.log(s) ** 2)
        assert abs(float(result.partial.mid) - direct) < 1e-9
        assert result.total.hi < 3

    def test_divergent_exponent_is_refused(self):
        h = build_h(2)
        with pytest.raises(ConfigError):
            lp_partial_norm(h, 1, 10, 10)

    def test_box_validation(self):
        with pytest.raises(ConfigError):
            lp_partial_norm(build_h(2), 2, 0, 5)


class TestBuildQ:
    def test_corner_encloses_zeta_three_halves_minus_one(self):
        grid = build_q(build_h(2), 1, 1, tail_terms=2000)
        with mpmath.workdps(50):
            oracle = mpmath.nstr(mpmath.zeta(mpmath.mpf("1.5")) - 1, 40)
        q11 = grid.value(1, 1)
        assert _contains(q11, oracle)
        assert q11.width < Fraction(2, 10**5)

    def test_bracket_certificate_passes(self):
        grid = build_q(build_h(2), 3, 3, tail_terms=200)
        assert grid.certificate.verdict
        kinds = {e.comparison for e in grid.certificate.entries}
        assert ">=" in kinds and "<=" in kinds

    def test_analytic_bracket_two_over_sqrt(self):
        # 2 (j+k)**-1/2 (1 - eps) <= q <= 2 (j+k-1)**-1/2 for the p = 2
        # function, checked directly on a sampled diagonal.
        grid = build_q(build_h(2), 5, 5, tail_terms=300)
        eps = Fraction(1, 1000)
        for s in (4, 7, 10):
            enc = grid.diagonals[s]
            # Avoid irrational square roots by squaring both comparisons:
            # q >= 2(1-eps)/sqrt(s) iff q**2 s >= 4(1-eps)**2, and
            # q <= 2/sqrt(s-1) iff q**2 (s-1) <= 4.
            assert enc.lo**2 * s >= 4 * (1 - eps) ** 2
            assert enc.hi**2 * (s - 1) <= 4

    def test_ten_times_more_terms_stays_inside(self):
        base = build_q(build_h(2), 2, 2, tail_terms=100)
        fine = build_q(build_h(2), 2, 2, tail_terms=1000)
        for s in (2, 3, 4):
            a, b = base.diagonals[s], fine.diagonals[s]
            assert max(a.lo, b.lo) <= min(a.hi, b.hi)
            assert b.width < a.width

    def test_difference_roundtrip_reproduces_f(self):
        # (I-U)(I-V) q telescopes to f = (I-U) h; on the diagonals this is
        # q(s) - 2 q(s+1) + q(s+2) = h(s) - h(s+1).
        h = build_h(2)
        grid = build_q(h, 4, 4, tail_terms=400)
        for s in range(2, 7):
            diff = (
                grid.diagonals[s]
                - 2 * grid.diagonals[s + 1]
                + grid.diagonals[s + 2]
            )
            f_enc = h.diagonal_value(s) - h.diagonal_value(s + 1)
            assert max(diff.lo, f_enc.lo) <= min(diff.hi, f_enc.hi)
            # The defect is the rolled-down remainder bracket, four of
            # which stack up in the second difference.
            assert diff.width <= 5 * grid.diagonals[s].width

    def test_strictly_decreasing_along_diagonals(self):
        grid = build_q(build_h(2), 4, 4, tail_terms=200)
        for s in range(2, 8):
            assert grid.diagonals[s + 1].hi < grid.diagonals[s].lo

    def test_logpower_grid_certifies(self):
        grid = build_q(build_h(1), 2, 2, tail_terms=200)
        assert grid.certificate.verdict
        direct = 0.0
        import math

        for t in range(2, 5000):
            direct += 1 / (t**2 * math.log(t) ** 2)
        q2 = grid.diagonals[2]
        assert q2.lo <= Fraction(repr(direct)) + Fraction(1, 100)
        assert q2.hi >= Fraction(repr(direct))

    def test_value_outside_box_is_refused(self):
        grid = build_q(build_h(2), 2, 2, tail_terms=50)
        with pytest.raises(ConfigError):
            grid.value(3, 1)

    def test_tail_terms_validation(self):
        with pytest.raises(ConfigError):
            build_q(build_h(2), 2, 2, tail_terms=1)


class TestDivergenceCertificate:
    def test_p2_row_sum_floor_exceeds_thirty_at_ten_thousand(self):
        report = divergence_certificate(2, 10**4)
        assert report.row_sum_lower.lo >= 30
        assert report.certificate.verdict

    def test_p2_row_sum_matches_exact_harmonic_arithmetic(self):
        # Oracle: 4 (1 - 1/1000)**2 * sum_{k<=K} 1/(1+k) in exact rationals.
        K = 200
        report = divergence_certificate(2, K)
        eps = Fraction(1, 1000)
        exact = 4 * (1 - eps) ** 2 * sum(Fraction(1, k + 1) for k in range(1, K + 1))
        assert abs(report.row_sum_lower.mid - exact) < Fraction(1, 10**25)

    def test_lower_bound_monotone_in_K(self):
        values = [
            divergence_certificate(2, K).row_sum_lower.lo
            for K in (100, 1000, 10**4)
        ]
        assert values[0] < values[1] < values[2]

    def test_l5_partial_sums_certified_bounded(self):
        report = divergence_certificate(2, 10**4)
        assert report.bounded_exponent == 5
        assert report.lr_partial.hi <= 96
        described = [
            e
            for e in report.certificate.entries
            if "q**5" in e.description and e.comparison == "<="
        ]
        assert described and described[0].satisfied

    def test_p1_threshold_is_certified_crossing(self):
        report = divergence_certificate(1, 10**4)
        J0 = report.log_threshold
        assert J0 is not None
        import math

        assert math.log(J0) ** 4 <= J0
        assert math.log(J0 - 1) ** 4 > J0 - 1
        assert report.certificate.verdict
        assert report.bounded_exponent == 3

    def test_p1_row_lower_bounds_positive(self):
        report = divergence_certificate(1, 10**4)
        assert report.row_sum_lower.lo > 0
        rows = [
            e
            for e in report.certificate.entries
            if e.description.startswith("row") and e.comparison == ">="
        ]
        assert len(rows) == 3 and all(e.satisfied for e in rows)

    def test_fractional_p_round_trips(self):
        report = divergence_certificate(Fraction(3, 2), 500)
        assert report.bounded_exponent == 4
        assert report.certificate.verdict
        # coefficient ((1-eps) p)**p with p = 3/2 against a float check
        import math

        coef = ((1 - 1e-3) * 1.5) ** 1.5
        harmonic = sum(1 / (1 + k) for k in range(1, 501))
        assert abs(float(report.row_sum_lower.mid) - coef * harmonic) < 1e-9

    def test_validation(self):
        with pytest.raises(ConfigError):
            divergence_certificate(Fraction(1, 2), 100)
        with pytest.raises(ConfigError):
            divergence_certificate(2, 4)


class TestCsv:
    def test_grid_csv_shape_and_header(self):
        grid = build_q(build_h(2), 3, 2, tail_terms=60)
        buf = io.StringIO()
        shift_grid_to_csv(grid, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "j,k,q_lo,q_hi"
        assert len(lines) == 1 + 3 * 2
        first = lines[1].split(",")
        assert first[0] == "1" and first[1] == "1"
        assert Fraction(first[2]) <= Fraction(first[3])

    def test_csv_rows_ordered_row_major(self):
        grid = build_q(build_h(2), 2, 3, tail_terms=60)
        buf = io.StringIO()
        shift_grid_to_csv(grid, buf)
        keys = [
            tuple(map(int, line.split(",")[:2]))
            for line in buf.getvalue().strip().splitlines()[1:]
        ]
        assert keys == sorted(keys)
