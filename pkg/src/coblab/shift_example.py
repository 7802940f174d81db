"""Shift operators on the quarter lattice and a certified divergence example.

On sequences indexed by pairs of positive integers, the horizontal and
vertical shifts U and V act by (Ux)_{j,k} = x_{j+1,k} and (Vx)_{j,k} =
x_{j,k+1}; both contract every l_p norm.  This module builds a function h
depending only on the diagonal s = j + k that lies in l_p, so that
f = (I - U)h is a coboundary for U, while the only formal solution of the
doubled equation f = (I - U)(I - V)x, namely q = sum_{n>=0} V^n h, falls
outside l_p: its first-row p-th powers decay exactly like a harmonic
series.

Everything is evaluated in certified interval arithmetic.  The convergent
side (h in l_p) returns an exact diagonal partial sum with an integral-test
tail bound, and the divergent side returns a certificate whose entries pin
the computed q between explicit integral brackets and bound its row sums
from below by a quantity that grows without bound.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import log
from typing import Optional, Union

from .certify import (
    Enclosure,
    exp_enclosure,
    log_enclosure,
    sqrt_enclosure,
)
from .constructions import Certificate, CertificateEntry, _require
from .diophantine import _decimal_str
from .errors import ConfigError, PrecisionCapError

Rational = Union[int, Fraction]

# Slack factor applied to analytic lower bounds so every certified
# comparison has room; the first omitted series term already exceeds the
# slack at the leading diagonals, so nothing real is given away.
_EPS = Fraction(1, 1000)

# Dyadic grid (2**-_ACC_BITS) for long directed-rounding accumulations.
_ACC_BITS = 120

_TERM_BITS = 110


def _rational_pow(base: Fraction, expo: Fraction, bits: int) -> Enclosure:
    """Enclosure of base**expo for positive rational base and rational expo.

    Integer exponents are exact, half-integer exponents go through a single
    integer square root, and everything else takes the exp(expo * log base)
    route with outward rounding at both stages.
    """
    base = Fraction(base)
    if base <= 0:
        raise ValueError("base must be positive")
    expo = Fraction(expo)
    if expo == 0 or base == 1:
        return Enclosure.point(1)
    if expo.denominator == 1:
        return Enclosure.point(base ** int(expo))
    if expo.denominator == 2:
        return sqrt_enclosure(base ** int(expo.numerator), bits)
    ln = log_enclosure(base, bits + 8)
    w = ln * expo
    lo = exp_enclosure(w.lo, bits + 4).lo
    upper = exp_enclosure(w.hi, bits + 4).hi
    return Enclosure(max(lo, Fraction(0)), upper)


@dataclass(frozen=True)
class LatticeFunction:
    """A positive function on the lattice that depends only on s = j + k.

    kind "power" means value s**(-exponent); kind "logpower" means
    s**(-2) * (log s)**(-2), the repair used at p = 1 where no pure power
    lands inside l_1.
    """

    kind: str
    p: Fraction
    exponent: Fraction

    def __post_init__(self):
        if self.kind not in ("power", "logpower"):
            raise ConfigError(f"unknown lattice function kind {self.kind!r}")
        if self.kind == "power" and self.exponent <= 1:
            raise ConfigError("power kind needs an exponent above 1")

    def diagonal_value(self, s: int, bits: int = _TERM_BITS) -> Enclosure:
        return _diag_power(self, s, Fraction(1), bits)

    def value(self, j: int, k: int, bits: int = _TERM_BITS) -> Enclosure:
        if j < 1 or k < 1:
            raise ConfigError("lattice indices start at 1")
        return self.diagonal_value(j + k, bits)


def _diag_power(
    f: LatticeFunction, s: int, power: Fraction, bits: int
) -> Enclosure:
    """Enclosure of f(s)**power along the diagonal, for positive power."""
    if s < 2:
        raise ConfigError("diagonals start at s = 2")
    power = Fraction(power)
    if f.kind == "power":
        return _rational_pow(Fraction(s), -f.exponent * power, bits)
    if power.denominator != 1:
        raise ConfigError(
            "the logarithmic kind supports integer powers only"
        )
    m = int(power)
    base = Enclosure.point(Fraction(1, s ** (2 * m)))
    log_sq = log_enclosure(s, bits).square()
    for _ in range(m):
        base = base / log_sq
    return base


def build_h(p: Rational) -> LatticeFunction:
    """The l_p member whose U-coboundary has no doubly-shifted solution.

    For p > 1 this is (j+k)**(-(p+1)/p); its p-th power sums like
    sum (s-1) s**(-p-1), which converges.  At p = 1 the same recipe would
    leave l_1, so a squared logarithm is inserted instead.
    """
    p = Fraction(p)
    if p < 1:
        raise ConfigError("the construction needs p >= 1")
    if p == 1:
        return LatticeFunction("logpower", p, Fraction(2))
    return LatticeFunction("power", p, (p + 1) / p)


# ---------------------------------------------------------------------------
# l_p norms: exact diagonal partial sums plus integral tails


@dataclass(frozen=True)
class LatticeSum:
    """A certified bracket for an infinite lattice sum.

    partial covers every complete diagonal s <= diagonals; tail is an
    interval [0, T] bounding everything discarded, so total = partial + tail
    contains the exact infinite sum.
    """

    partial: Enclosure
    tail: Enclosure
    total: Enclosure
    diagonals: int


def lp_partial_norm(
    f: LatticeFunction, p: Rational, J: int, K: int
) -> LatticeSum:
    """Certified bracket for sum of f(j,k)**p over all j, k >= 1.

    The partial sum runs over the complete diagonals s <= min(J,K) + 1
    (every lattice point with that diagonal lies inside the J x K box);
    each diagonal contributes (s-1) f(s)**p.  The discarded part is bounded
    by the integral test, which requires the diagonal series to converge.
    """
    if J < 1 or K < 1:
        raise ConfigError("box dimensions must be positive")
    p = Fraction(p)
    if p < 1:
        raise ConfigError("l_p exponents below 1 are not supported")
    S = min(J, K) + 1

    if f.kind == "power":
        kappa = f.exponent * p
        if kappa <= 2:
            raise ConfigError(
                "the diagonal series sum (s-1) s**(-kappa) diverges for "
                f"kappa = {kappa}; no finite tail bound exists"
            )
        if kappa.denominator == 1:
            partial = _integer_power_partial(S, int(kappa))
        else:
            partial = _generic_power_partial(f, p, S)
        # (s-1) s**-kappa <= s**(1-kappa), then integral comparison.
        tail_hi = _rational_pow(Fraction(S), 2 - kappa, 96).hi / (kappa - 2)
    else:
        if p.denominator != 1:
            raise ConfigError(
                "the logarithmic kind supports integer l_p exponents only"
            )
        m = int(p)
        partial = _logpower_partial(S, m)
        if m == 1:
            # sum_{s>S} (s-1) s**-2 (log s)**-2 <= int_S^inf dx/(x log^2 x).
            tail_hi = 1 / log_enclosure(S, 96).lo
        else:
            tail_hi = Fraction(1, S ** (2 * m - 2)) / (
                (2 * m - 2) * log_enclosure(S, 96).lo ** (2 * m)
            )
    tail = Enclosure(Fraction(0), tail_hi)
    return LatticeSum(partial, tail, partial + tail, S)


def _integer_power_partial(S: int, kappa: int) -> Enclosure:
    """sum_{s=2..S} (s-1) s**-kappa by directed dyadic accumulation."""
    scale = 1 << _ACC_BITS
    lo = 0
    hi = 0
    for s in range(2, S + 1):
        num = (s - 1) * scale
        den = s**kappa
        lo += num // den
        hi += -((-num) // den)
    return Enclosure(Fraction(lo, scale), Fraction(hi, scale))


def _generic_power_partial(
    f: LatticeFunction, p: Fraction, S: int
) -> Enclosure:
    acc = Enclosure.point(0)
    for s in range(2, S + 1):
        acc = (acc + (s - 1) * _diag_power(f, s, p, _TERM_BITS)).rounded(
            _ACC_BITS + 40
        )
    return acc


def _logpower_partial(S: int, m: int) -> Enclosure:
    acc = Enclosure.point(0)
    for s in range(2, S + 1):
        log_sq = log_enclosure(s, _TERM_BITS).square()
        term = Enclosure.point(Fraction(s - 1, s ** (2 * m)))
        for _ in range(m):
            term = term / log_sq
        acc = (acc + term).rounded(_ACC_BITS + 40)
    return acc


# ---------------------------------------------------------------------------
# the formal solution q and its certified brackets


@dataclass(frozen=True)
class ShiftGrid:
    """Certified values of q = sum_{n>=0} V^n h on a J x K box.

    q inherits the diagonal structure of h, so one enclosure per diagonal
    covers the whole box.  The certificate pins sampled diagonals between
    integral lower and upper brackets.
    """

    source: LatticeFunction
    J: int
    K: int
    tail_terms: int
    diagonals: dict
    certificate: Certificate

    def value(self, j: int, k: int) -> Enclosure:
        if not (1 <= j <= self.J and 1 <= k <= self.K):
            raise ConfigError("lattice point outside the computed box")
        return self.diagonals[j + k]

    def rows(self):
        for j in range(1, self.J + 1):
            for k in range(1, self.K + 1):
                yield j, k, self.diagonals[j + k]


def _power_series_remainder(
    f: LatticeFunction, M: int, bits: int = 96
) -> Enclosure:
    """Bracket for sum_{t>=M} f(t) by integral comparison from both sides."""
    if f.kind == "power":
        kappa = f.exponent
        lo = _integral_power(M, kappa, bits).lo
        hi = _integral_power(M - 1, kappa, bits).hi
        return Enclosure(lo, hi)
    # Logarithmic kind: freeze the log factor at each end of the range.
    # Lower: terms M..2M alone, with (log t)**-2 >= (log 2M)**-2 there and
    # sum t**-2 >= 1/M - 1/(2M+1).  Upper: (log t)**-2 <= (log M)**-2 and
    # sum_{t>=M} t**-2 <= 1/(M-1).
    if M < 3:
        raise ConfigError("logarithmic remainders need M >= 3")
    lo = (Fraction(1, M) - Fraction(1, 2 * M + 1)) / log_enclosure(
        2 * M, bits
    ).hi ** 2
    hi = Fraction(1, M - 1) / log_enclosure(M, bits).lo ** 2
    return Enclosure(lo, hi)


def _integral_power(M: int, kappa: Fraction, bits: int = 96) -> Enclosure:
    """int_M^inf x**-kappa dx = M**(1-kappa) / (kappa - 1)."""
    return _rational_pow(Fraction(M), 1 - kappa, bits) / (kappa - 1)


def _q_diagonal_upper(f: LatticeFunction, s: int, bits: int = 96) -> Enclosure:
    """Analytic upper bound on q(s) = sum_{t>=s} f(t), valid for s >= 2."""
    if f.kind == "power":
        return _integral_power(s - 1, f.exponent, bits) if s >= 3 else (
            _diag_power(f, 2, Fraction(1), bits)
            + _integral_power(2, f.exponent, bits)
        )
    # q(s) <= f(s) + int_s^inf <= (log s)**-2 (s**-2 + s**-1).
    return Enclosure.point(
        (Fraction(1, s * s) + Fraction(1, s)) / log_enclosure(s, bits).lo ** 2
    )


def build_q(
    f: LatticeFunction, J: int, K: int, tail_terms: int = 64
) -> ShiftGrid:
    """Evaluate the formal solution q(j,k) = sum_{n>=0} f(j, k+n).

    Each diagonal value is an explicit truncated sum plus an integral
    bracket for the remainder, computed once at the far end and rolled
    down by the exact recurrence q(s) = f(s) + q(s+1).  For the power
    kind the result is certified to lie between the integral bounds
    int_s^inf x**-kappa dx and int_{s-1}^inf x**-kappa dx.
    """
    if J < 1 or K < 1:
        raise ConfigError("box dimensions must be positive")
    if tail_terms < 2:
        raise ConfigError("need at least two explicit tail terms")
    s_max = J + K
    M = s_max + tail_terms

    remainder = _power_series_remainder(f, M)
    diagonals: dict = {}
    running = remainder
    for t in range(M - 1, 1, -1):
        running = (f.diagonal_value(t) + running).rounded(_ACC_BITS + 40)
        if t <= s_max:
            diagonals[t] = running

    entries = [
        CertificateEntry(
            description=(
                f"remainder past t = {M} bracketed by integral comparison"
            ),
            value=remainder,
        )
    ]
    sample = sorted(
        s for s in {2, 3, max(2, s_max // 2), s_max} if s <= s_max
    )
    for s in sample:
        if f.kind == "power":
            lower = (1 - _EPS) * _integral_power(s, f.exponent)
        else:
            lower = (1 - _EPS) * _power_series_remainder(f, max(s, 3))
        upper = _q_diagonal_upper(f, s)
        enc = diagonals[s]
        entries.append(
            CertificateEntry(
                description=f"q on the diagonal j+k = {s} vs integral lower",
                value=enc,
                comparison=">=",
                threshold=Enclosure(lower.lo, lower.lo),
            )
        )
        entries.append(
            CertificateEntry(
                description=f"q on the diagonal j+k = {s} vs integral upper",
                value=enc,
                comparison="<=",
                threshold=Enclosure(upper.hi, upper.hi),
            )
        )
    cert = _require(
        Certificate(kind="membership", entries=tuple(entries)),
        "formal solution brackets",
    )
    return ShiftGrid(f, J, K, tail_terms, diagonals, cert)


def shift_grid_to_csv(grid: ShiftGrid, fileobj) -> None:
    """One row per lattice point with outward-rounded decimal endpoints."""
    writer = csv.writer(fileobj)
    writer.writerow(["j", "k", "q_lo", "q_hi"])
    for j, k, enc in grid.rows():
        writer.writerow(
            [j, k, _decimal_str(enc.lo, "down"), _decimal_str(enc.hi, "up")]
        )


# ---------------------------------------------------------------------------
# the divergence certificate


@dataclass(frozen=True)
class DivergenceReport:
    """Both halves of the dichotomy for the formal solution q.

    row_sum_lower bounds sum_{k<=K} q(1,k)**p from below; for p > 1 it
    grows like p**p log K, so the first row alone expels q from l_p.  At
    p = 1 single rows stay summable and the divergence comes from the row
    totals decaying only like j**(-1/2); the certificate then bounds
    several rows from below.  lr_partial certifies that q still lies in
    l_r for the recorded exponent r > 2p: the doubled equation fails in
    l_p, not for lack of any decay.
    """

    p: Fraction
    K: int
    row_sum_lower: Enclosure
    bounded_exponent: int
    lr_partial: Enclosure
    log_threshold: Optional[int]
    certificate: Certificate


def _harmonic_shift_sum(K: int) -> Enclosure:
    """sum_{k=1..K} 1/(1+k) on the dyadic grid."""
    scale = 1 << _ACC_BITS
    lo = 0
    hi = 0
    for k in range(1, K + 1):
        lo += scale // (k + 1)
        hi += -((-scale) // (k + 1))
    return Enclosure(Fraction(lo, scale), Fraction(hi, scale))


def _isqrt_pow32_sum(terms) -> Enclosure:
    """sum of m**(-3/2) over the given integers, directed dyadic rounding."""
    from math import isqrt

    bits = 80
    scale = 1 << bits
    sq = scale * scale
    lo = 0
    hi = 0
    for m in terms:
        u = isqrt((m**3) << (2 * bits))
        lo += sq // (u + 1)
        hi += -((-sq) // u)
    return Enclosure(Fraction(lo, scale), Fraction(hi, scale))


def _log4_below(n: int) -> bool:
    """Certified test of (log n)**4 <= n."""
    bits = 160
    while True:
        quart = log_enclosure(n, bits).square().square()
        if quart.hi <= n:
            return True
        if quart.lo > n:
            return False
        if bits >= 4096:
            raise PrecisionCapError(
                f"(log {n})**4 vs {n} unresolved at the hard cap"
            )
        bits *= 2


def _power_envelope_threshold() -> int:
    """First n past which (log n)**4 <= n holds for every later integer.

    x / (log x)**4 is increasing for x > e**4, so a float scan from 55
    locates the crossing and two certified comparisons pin it exactly.
    """
    n = 55
    while log(n) ** 4 > n:
        n += 1
    while not _log4_below(n):
        n += 1
    while n > 55 and _log4_below(n - 1):
        n -= 1
    return n


def _q_point(f: LatticeFunction, s: int, terms: int = 48) -> Enclosure:
    """Direct enclosure of q(s) = sum_{t>=s} f(t) without a full grid."""
    acc = _power_series_remainder(f, s + terms)
    for t in range(s + terms - 1, s - 1, -1):
        acc = (acc + f.diagonal_value(t)).rounded(_ACC_BITS + 40)
    return acc


def _power_divergence(p: Fraction, K: int) -> DivergenceReport:
    f = build_h(p)
    kappa = f.exponent
    r = (2 * p).__floor__() + 1
    entries = []

    # Row 1: q(1,k) >= int_{1+k}^inf x**-kappa dx = p (1+k)**((1-kappa)),
    # and (1-kappa) p = -1 exactly, so p-th powers are harmonic.
    coef = _rational_pow((1 - _EPS) * p, p, 140)
    harmonic = _harmonic_shift_sum(K)
    row_sum_lower = coef * harmonic
    log_thr = (log_enclosure(K + 2, 96) - 1) * coef
    entries.append(
        CertificateEntry(
            description=(
                f"row 1 sum of q**{p} over k <= {K} vs its logarithmic "
                "growth floor"
            ),
            value=row_sum_lower,
            comparison=">=",
            threshold=log_thr,
        )
    )
    entries.append(
        CertificateEntry(
            description=(
                "slack 1/1000 in lower bounds; the first omitted series "
                "term exceeds it on every sampled diagonal"
            ),
            value=Enclosure.point(_EPS),
        )
    )
    for k in sorted({1, 7, K}):
        enc = _q_point(f, 1 + k)
        entries.append(
            CertificateEntry(
                description=f"q at row 1, column {k} vs integral lower",
                value=enc,
                comparison=">=",
                threshold=Enclosure.point(
                    ((1 - _EPS) * _integral_power(1 + k, kappa)).lo
                ),
            )
        )
        entries.append(
            CertificateEntry(
                description=f"q at row 1, column {k} vs integral upper",
                value=enc,
                comparison="<=",
                threshold=Enclosure.point(_q_diagonal_upper(f, 1 + k).hi),
            )
        )

    # l_r control: q(s) <= int_{s-1}^inf x**-kappa = p (s-1)**(-1/p), so
    # sum (s-1) q(s)**r <= p**r sum_m m**(1 - r/p) with m = s - 1, and
    # 1 - r/p < -1.  Partial sum plus integral tail, then a closed bound.
    e_r = 1 - Fraction(r, p)
    cap = 1000 if e_r.denominator in (1, 2) else 200
    acc = Enclosure.point(0)
    for m in range(1, cap + 1):
        acc = (acc + _rational_pow(Fraction(m), e_r, _TERM_BITS)).rounded(
            _ACC_BITS + 40
        )
    tail_hi = p * _rational_pow(Fraction(cap), Fraction(-1) / p, 96).hi
    coef_r = (
        Enclosure.point(p**r)
        if p.denominator == 1
        else _rational_pow(p, Fraction(r), 140)
    )
    lr_partial = coef_r * (acc + Enclosure(Fraction(0), tail_hi))
    closed = (coef_r * (1 + p)).hi
    entries.append(
        CertificateEntry(
            description=(
                f"full lattice sum of q**{r} vs its closed convergence bound"
            ),
            value=lr_partial,
            comparison="<=",
            threshold=Enclosure.point(closed),
        )
    )
    cert = _require(
        Certificate(kind="divergence-witness", entries=tuple(entries)),
        "divergence certificate",
    )
    return DivergenceReport(p, K, row_sum_lower, r, lr_partial, None, cert)


def _logpower_divergence(K: int) -> DivergenceReport:
    p = Fraction(1)
    f = build_h(1)
    r = 3
    J0 = _power_envelope_threshold()
    entries = [
        CertificateEntry(
            description=f"(log n)**4 at n = {J0}",
            value=log_enclosure(J0, 200).square().square(),
            comparison="<=",
            threshold=Enclosure.point(J0),
        ),
        CertificateEntry(
            description=f"(log n)**4 at n = {J0 - 1}",
            value=log_enclosure(J0 - 1, 200).square().square(),
            comparison=">",
            threshold=Enclosure.point(J0 - 1),
        ),
        CertificateEntry(
            description=(
                "x/(log x)**4 increases past e**4, so the power envelope "
                f"t**(-5/2) <= t**(-2)(log t)**(-2) holds for all t >= {J0}"
            ),
            value=Enclosure.point(J0),
        ),
    ]
    for t in (J0, 2 * J0):
        entries.append(
            CertificateEntry(
                description=f"series term vs power envelope at t = {t}",
                value=f.diagonal_value(t),
                comparison=">=",
                threshold=Enclosure.point(
                    _rational_pow(Fraction(t), Fraction(-5, 2), 120).hi
                ),
            )
        )

    # Row sums: q(j,k) >= sum_{t >= max(j+k, J0)} t**(-5/2)
    #                  >= (2/3) max(j+k, J0)**(-3/2).
    # Summed over k <= K this stays bounded for each fixed j, but the row
    # totals only decay like j**(-1/2): their sum over j diverges, which
    # is what expels q from l_1.
    row_lowers = {}
    for j in (1, 2, 4):
        terms = (max(j + k, J0) for k in range(1, K + 1))
        row_lowers[j] = Fraction(2, 3) * (1 - _EPS) * _isqrt_pow32_sum(terms)
        threshold = Fraction(2, 3) * (1 - _EPS) ** 2 * _row_integral_lower(
            j, K, J0
        )
        entries.append(
            CertificateEntry(
                description=(
                    f"row {j} sum of q over k <= {K} vs integral lower"
                ),
                value=row_lowers[j],
                comparison=">=",
                threshold=Enclosure.point(threshold.lo),
            )
        )
    row_sum_lower = row_lowers[1]

    # l_3 control: q(s) <= (log s)**-2 (s**-2 + s**-1), so
    # (s-1) q**3 <= 8 s**-2 (log s)**-6 past the partial range.
    cap = 400
    acc = Enclosure.point(0)
    for s in range(2, cap + 1):
        qhi = _q_diagonal_upper(f, s)
        acc = (acc + (s - 1) * qhi * qhi * qhi).rounded(_ACC_BITS + 40)
    log_cap = log_enclosure(cap, 96).lo
    tail_hi = 8 / (Fraction(cap) * log_cap**6)
    lr_partial = acc + Enclosure(Fraction(0), tail_hi)
    log2 = log_enclosure(2, 96).lo
    log3 = log_enclosure(3, 96).lo
    closed = (Fraction(3, 4) / log2**2) ** 3 + 8 / (2 * log3**6) + 1
    entries.append(
        CertificateEntry(
            description=(
                "full lattice sum of q**3 vs its closed convergence bound"
            ),
            value=lr_partial,
            comparison="<=",
            threshold=Enclosure.point(closed),
        )
    )
    cert = _require(
        Certificate(kind="divergence-witness", entries=tuple(entries)),
        "divergence certificate",
    )
    return DivergenceReport(p, K, row_sum_lower, r, lr_partial, J0, cert)


def _row_integral_lower(j: int, K: int, J0: int) -> Enclosure:
    """Integral lower bound for sum_{k<=K} max(j+k, J0)**(-3/2)."""
    flat = max(0, min(K, J0 - j - 1))
    total = Enclosure.point(flat) * _rational_pow(
        Fraction(J0), Fraction(-3, 2), 96
    )
    if j + K >= J0:
        start = max(j + 1, J0)
        sloped = 2 * (
            _rational_pow(Fraction(start), Fraction(-1, 2), 96)
            - _rational_pow(Fraction(j + K + 2), Fraction(-1, 2), 96)
        )
        total = total + sloped
    return total


def divergence_certificate(p: Rational, K: int) -> DivergenceReport:
    """Certify that the formal solution q escapes l_p as K grows.

    For p > 1 the entries pin sampled first-row values of q between
    integral brackets, bound the row sum of p-th powers below by a
    logarithmically growing floor, and bound the whole-lattice l_r sum
    (r the smallest integer above 2p) above by a closed constant.  At
    p = 1 the power envelope threshold is certified first and the row
    totals are bounded below instead.
    """
    p = Fraction(p)
    if p < 1:
        raise ConfigError("the construction needs p >= 1")
    if K < 8:
        raise ConfigError("need at least K = 8 columns")
    if p == 1:
        return _logpower_divergence(K)
    return _power_divergence(p, K)
