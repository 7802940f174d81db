"""Diophantine approximation machinery for pairs of quadratic irrationals.

The central search asks for denominators q that approximate two rotation
numbers simultaneously: max(||q*alpha||, ||q*beta||) < q**(-1/2), the
two-dimensional pigeonhole guarantee evaluated here by exact arithmetic.
Bulk scans run a float64 prefilter with a documented error margin; every
candidate the prefilter surfaces is confirmed or rejected exactly, and the
margin certifies that nothing admissible was skipped (product rounding over
q <= Q stays below Q * 2**-49, far under the margin).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .certify import (
    Enclosure,
    max_enclosure,
    pow_enclosure,
    refine,
    separate,
    sqrt_enclosure,
)
from .errors import ConfigError, PrecisionCapError, ShortfallError
from .surd import QuadraticSurd

Rational = Union[int, float, Fraction]

_CHUNK = 1 << 20


@dataclass(frozen=True)
class ApproximationRecord:
    """One simultaneous approximation denominator with certified intervals.

    quality encloses sqrt(q) * max(||q*alpha||, ||q*beta||) and sits strictly
    below 1 for every record produced by dirichlet_pair_search.
    """

    q: int
    dist_alpha: Enclosure
    dist_beta: Enclosure
    quality: Enclosure


@dataclass(frozen=True)
class Dependence:
    """An exact integer relation m*alpha + n*beta + p = 0."""

    m: int
    n: int
    p: int
    gcd_mn: int


@dataclass(frozen=True)
class BadnessProfile:
    """Partial-quotient and q*||q*x|| evidence for badly approximable x."""

    max_partial_quotient: int
    period_length: Optional[int]
    certified_all_quotients: bool
    min_normalized: Enclosure
    argmin_q: int


def _as_fraction(value: Rational, name: str) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot interpret {name}={value!r} as a rational") from exc


def _half_clamp(enc: Enclosure) -> Enclosure:
    """Clamp an integer-distance enclosure into its a priori range [0, 1/2]."""
    return Enclosure(max(enc.lo, Fraction(0)), min(enc.hi, Fraction(1, 2)))


def nearest_integer_distance(
    x: QuadraticSurd, q: int, tol: Rational = Fraction(1, 10**30)
) -> Enclosure:
    """Certified enclosure of ||q*x||, the distance from q*x to the integers.

    Width is at most tol; endpoints are clamped into [0, 1/2]. Precision
    escalates from 128 bits, doubling to the 8192-bit cap.
    """
    x.require_irrational("x")
    if q < 1:
        raise ConfigError(f"q must be a positive integer, got {q}")
    dist = (x * q).dist_to_int()
    enc = refine(dist.enclosure, _as_fraction(tol, "tol"))
    return _half_clamp(enc)


# ---------------------------------------------------------------------------
# continued fractions


def continued_fraction(x: QuadraticSurd, depth: int) -> list[int]:
    """Partial quotients [a_0, ..., a_depth] of x, computed exactly."""
    x.require_irrational("x")
    if depth < 0:
        raise ConfigError("depth must be nonnegative")
    quotients = []
    current = x
    for _ in range(depth + 1):
        a = current.__floor__()
        quotients.append(a)
        current = (current - a).inverse()
    return quotients


def convergents(x: QuadraticSurd, depth: int) -> list[tuple[int, int]]:
    """Convergents (p_k, q_k) for k = 0..depth from the exact quotient list."""
    quotients = continued_fraction(x, depth)
    out = []
    p_prev, p_curr = 1, quotients[0]
    q_prev, q_curr = 0, 1
    out.append((p_curr, q_curr))
    for a in quotients[1:]:
        p_prev, p_curr = p_curr, a * p_curr + p_prev
        q_prev, q_curr = q_curr, a * q_curr + q_prev
        out.append((p_curr, q_curr))
    return out


def badness_profile(x: QuadraticSurd, depth: int) -> BadnessProfile:
    """Partial-quotient ceiling and the smallest q*||q*x|| over convergents.

    Quadratic surds have eventually periodic quotient sequences; the Gauss
    map states are exact surds here, so a repeated state certifies that the
    maximum over the examined window bounds every later quotient. The
    normalized distances q_k * ||q_k x|| are compared exactly inside the
    field of x.
    """
    x.require_irrational("x")
    if depth < 1:
        raise ConfigError("depth must be at least 1")

    quotients = [x.__floor__()]
    seen: dict[QuadraticSurd, int] = {}
    period = None
    current = (x - quotients[0]).inverse()
    k = 1
    while k <= depth:
        if current in seen:
            period = k - seen[current]
            break
        seen[current] = k
        a = current.__floor__()
        quotients.append(a)
        current = (current - a).inverse()
        k += 1
    max_quotient = max(quotients[1:]) if len(quotients) > 1 else quotients[0]

    best_q, best_value, best_enc = None, None, None
    p_prev, p_curr = 1, quotients[0]
    q_prev, q_curr = 0, 1
    for a in quotients[1:]:
        p_prev, p_curr = p_curr, a * p_curr + p_prev
        q_prev, q_curr = q_curr, a * q_curr + q_prev
        value = (x * q_curr).dist_to_int() * q_curr
        if best_value is None or value < best_value:  # exact same-field order
            best_q, best_value = q_curr, value
    best_enc = refine(best_value.enclosure, Fraction(1, 10**30))
    return BadnessProfile(
        max_partial_quotient=max_quotient,
        period_length=period,
        certified_all_quotients=period is not None,
        min_normalized=best_enc,
        argmin_q=best_q,
    )


# ---------------------------------------------------------------------------
# simultaneous Dirichlet search


def _float_fraction(x: QuadraticSurd) -> float:
    """float64 of frac(x), good to one ulp via the certified enclosure."""
    return float(x.frac().enclosure(96).mid)


def _scan_candidates(alpha_f: float, beta_f: float, Q: int, margin: float) -> list[int]:
    """Float64 prescan: all q whose distances sit within margin of q**-1/2."""
    out: list[int] = []
    for start in range(1, Q + 1, _CHUNK):
        stop = min(start + _CHUNK - 1, Q)
        q = np.arange(start, stop + 1, dtype=np.float64)
        thr = 1.0 / np.sqrt(q) + margin
        fa = (q * alpha_f) % 1.0
        da = np.minimum(fa, 1.0 - fa)
        mask = da < thr
        if mask.any():
            fb = (q[mask] * beta_f) % 1.0
            db = np.minimum(fb, 1.0 - fb)
            hits = np.nonzero(db < thr[mask])[0]
            base = q[mask][hits].astype(np.int64)
            out.extend(int(v) for v in base)
    return out


def _quality_enclosure(
    q: int, da: QuadraticSurd, db: QuadraticSurd, tol: Fraction
) -> Enclosure:
    def producer(bits: int) -> Enclosure:
        return sqrt_enclosure(q, bits) * max_enclosure(
            da.enclosure(bits), db.enclosure(bits)
        )

    enc = refine(producer, tol)
    bits = 256
    while enc.hi >= 1:
        # admissibility was proven exactly, so the interval must fall below 1
        enc = producer(bits)
        bits *= 2
        if bits > 1 << 15:
            raise PrecisionCapError("quality interval refused to drop below 1")
    return enc


def dirichlet_pair_search(
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    Q: int,
    tol: Rational = Fraction(1, 10**12),
) -> list[ApproximationRecord]:
    """All q <= Q with max(||q*alpha||, ||q*beta||) < q**(-1/2), certified.

    A float64 prescan proposes candidates (margin Q*2**-49 + 2**-40 dominates
    the scan's rounding error, so no admissible q is missed for Q up to 1e8);
    each candidate is then settled by exact integer arithmetic: q*dist**2 - 1
    is a quadratic surd whose sign decides strict admissibility.
    """
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    if Q < 1:
        raise ConfigError(f"Q must be a positive integer, got {Q}")
    if Q > 10**8:
        raise ConfigError("scan bound above 1e8 exceeds the prefilter's margin")
    tol_f = _as_fraction(tol, "tol")

    margin = Q * 2.0**-49 + 2.0**-40
    candidates = _scan_candidates(_float_fraction(alpha), _float_fraction(beta), Q, margin)

    records = []
    for q in candidates:
        da = (alpha * q).dist_to_int()
        if ((da * da * q) - 1).sign() >= 0:
            continue
        db = (beta * q).dist_to_int()
        if ((db * db * q) - 1).sign() >= 0:
            continue
        records.append(
            ApproximationRecord(
                q=q,
                dist_alpha=_half_clamp(refine(da.enclosure, tol_f)),
                dist_beta=_half_clamp(refine(db.enclosure, tol_f)),
                quality=_quality_enclosure(q, da, db, tol_f),
            )
        )
    records.sort(key=lambda r: r.q)
    return records


def select_summable_lacunary(
    records: Sequence[ApproximationRecord],
    ratio: Rational = 2.0,
    budget: Rational = 2.0,
) -> list[ApproximationRecord]:
    """Greedy smallest-first subsequence with q_{k+1} >= ratio * q_k whose
    certified sum of q**-1/2 upper bounds stays at or below budget.

    Raises ShortfallError when fewer than two records survive.
    """
    ratio_f = _as_fraction(ratio, "ratio")
    budget_f = _as_fraction(budget, "budget")
    if ratio_f <= 1:
        raise ConfigError("ratio must exceed 1")
    if budget_f <= 0:
        raise ConfigError("budget must be positive")

    chosen: list[ApproximationRecord] = []
    partial_hi = Fraction(0)
    last_q = None
    for rec in sorted(records, key=lambda r: r.q):
        if last_q is not None and Fraction(rec.q) < ratio_f * last_q:
            continue
        contribution = sqrt_enclosure(Fraction(1, rec.q), 128).hi
        if partial_hi + contribution > budget_f:
            continue
        chosen.append(rec)
        partial_hi += contribution
        last_q = rec.q
    if len(chosen) < 2:
        raise ShortfallError(
            f"only {len(chosen)} of {len(records)} records are selectable at "
            f"ratio {float(ratio_f)}, budget {float(budget_f)}"
        )
    return chosen


def summability_enclosure(records: Sequence[ApproximationRecord], bits: int = 160) -> Enclosure:
    """Certified enclosure of sum over records of q**-1/2."""
    total = Enclosure.point(0)
    for rec in records:
        total = total + sqrt_enclosure(Fraction(1, rec.q), bits)
    return total


# ---------------------------------------------------------------------------
# badly approximable pairs


def bad_pair_constant(
    alpha: QuadraticSurd, beta: QuadraticSurd, Q: int
) -> tuple[Enclosure, int]:
    """Running minimum of sqrt(q)*max(||q*alpha||, ||q*beta||) for q <= Q.

    A finite-depth upper estimate of the pair's badness constant: the true
    infimum over all q can only be smaller. Returns (enclosure, argmin q).
    A float64 pass locates near-minimal q; the winner among them is settled
    by adaptive certified comparison.
    """
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    if Q < 1:
        raise ConfigError(f"Q must be a positive integer, got {Q}")

    alpha_f, beta_f = _float_fraction(alpha), _float_fraction(beta)
    best_float = math.inf
    values = []
    for start in range(1, Q + 1, _CHUNK):
        stop = min(start + _CHUNK - 1, Q)
        q = np.arange(start, stop + 1, dtype=np.float64)
        fa = (q * alpha_f) % 1.0
        fb = (q * beta_f) % 1.0
        v = np.sqrt(q) * np.maximum(
            np.minimum(fa, 1.0 - fa), np.minimum(fb, 1.0 - fb)
        )
        values.append(v)
        best_float = min(best_float, float(v.min()))
    # float error on sqrt(q)*dist stays below ~Q**0.5 * Q * 2**-50; the safety
    # band is far wider at desk scale
    safety = max(1e-6, Q**1.5 * 2.0**-48)
    candidate_qs: list[int] = []
    for i, v in enumerate(values):
        base = i * _CHUNK + 1
        hits = np.nonzero(v <= best_float + safety)[0]
        candidate_qs.extend(int(base + h) for h in hits)

    def producer_for(q: int):
        da = (alpha * q).dist_to_int()
        db = (beta * q).dist_to_int()

        def producer(bits: int) -> Enclosure:
            return sqrt_enclosure(q, bits) * max_enclosure(
                da.enclosure(bits), db.enclosure(bits)
            )

        return producer

    best_q = candidate_qs[0]
    best_producer = producer_for(best_q)
    for q in candidate_qs[1:]:
        contender = producer_for(q)
        try:
            if separate(contender, best_producer) < 0:
                best_q, best_producer = q, contender
        except PrecisionCapError:
            # ties are kept at the smaller q
            continue
    return refine(best_producer, Fraction(1, 10**30)), best_q


# ---------------------------------------------------------------------------
# square denominators and integer dependence


def square_approximation_search(
    beta: QuadraticSurd, delta: Rational, N: int
) -> list[int]:
    """All n <= N with ||n^2 * beta|| < n**(-delta), each settled exactly.

    delta must sit in (1/2, 2/3); float inputs are taken at their exact
    binary value. Thresholds n**(-delta) are certified power enclosures and
    the comparison escalates precision until strict.
    """
    beta.require_irrational("beta")
    delta_f = _as_fraction(delta, "delta")
    if not Fraction(1, 2) < delta_f < Fraction(2, 3):
        raise ConfigError(f"delta must lie in (1/2, 2/3), got {float(delta_f)}")
    if N < 1:
        raise ConfigError(f"N must be a positive integer, got {N}")
    if N > 10**6:
        raise ConfigError("square scan bound above 1e6 exceeds the float margin")

    beta_f = _float_fraction(beta)
    n = np.arange(1, N + 1, dtype=np.float64)
    fa = (n * n * beta_f) % 1.0
    dist = np.minimum(fa, 1.0 - fa)
    # n^2*beta rounding stays below N**2 * 2**-50 ~ 1e-3 margin at N = 1e6
    margin = max(1e-8, N * N * 2.0**-50)
    thr = n ** (-float(delta_f)) + margin + 1e-12 * n ** (-float(delta_f))
    candidates = np.nonzero(dist < thr)[0] + 1

    accepted = []
    for n_val in (int(v) for v in candidates):
        dist_surd = (beta * (n_val * n_val)).dist_to_int()
        if n_val == 1:
            accepted.append(1)  # threshold is 1 and distances never exceed 1/2
            continue
        threshold = lambda bits, nv=n_val: pow_enclosure(nv, -delta_f, bits)
        if separate(dist_surd.enclosure, threshold) < 0:
            accepted.append(n_val)
    return accepted


def integer_dependence_search(
    alpha: QuadraticSurd, beta: QuadraticSurd, B: int
) -> Optional[Dependence]:
    """Smallest relation m*alpha + n*beta + p = 0 with |m|,|n|,|p| <= B.

    Distinct radicands force independence (1, sqrt(d), sqrt(d') are linearly
    independent over the rationals), reported as None. Otherwise the search
    is exhaustive in exact arithmetic, ordered by |m|+|n|+|p| with ties
    broken lexicographically and toward positive m.
    """
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    if B < 1:
        raise ConfigError(f"B must be a positive integer, got {B}")
    if alpha.d != beta.d:
        return None

    triples = [
        (m, n, p)
        for m in range(-B, B + 1)
        for n in range(-B, B + 1)
        for p in range(-B, B + 1)
        if (m, n, p) != (0, 0, 0)
    ]
    triples.sort(
        key=lambda t: (
            abs(t[0]) + abs(t[1]) + abs(t[2]),
            abs(t[0]),
            abs(t[1]),
            abs(t[2]),
            t[0] <= 0,
        )
    )
    for m, n, p in triples:
        if alpha * m + beta * n + p == 0:
            return Dependence(m=m, n=n, p=p, gcd_mn=math.gcd(abs(m), abs(n)))
    return None


# ---------------------------------------------------------------------------
# serialization


def _decimal_str(value: Fraction, direction: str, digits: int = 30) -> str:
    """Directed decimal rendering so CSV endpoints stay certified."""
    rounding = ROUND_FLOOR if direction == "down" else ROUND_CEILING
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        d = Decimal(int(value.numerator)) / Decimal(int(value.denominator))
    return format(d, "f")


def records_to_csv(records: Iterable[ApproximationRecord], fileobj) -> None:
    """Write search records with outward-rounded interval endpoints."""
    writer = csv.writer(fileobj)
    writer.writerow(
        [
            "q",
            "dist_alpha_lo",
            "dist_alpha_hi",
            "dist_beta_lo",
            "dist_beta_hi",
            "quality_lo",
            "quality_hi",
        ]
    )
    for rec in records:
        writer.writerow(
            [
                rec.q,
                _decimal_str(rec.dist_alpha.lo, "down"),
                _decimal_str(rec.dist_alpha.hi, "up"),
                _decimal_str(rec.dist_beta.lo, "down"),
                _decimal_str(rec.dist_beta.hi, "up"),
                _decimal_str(rec.quality.lo, "down"),
                _decimal_str(rec.quality.hi, "up"),
            ]
        )
