"""Explicit joint coboundaries that are not double coboundaries, with
machine-checked certificates, plus the sufficient-condition checkers and
obstruction witnesses surrounding them.

The flagship pipeline picks simultaneous Dirichlet denominators q_k for a
rotation pair (alpha, beta), puts f_hat(q_k) = ||q_k*beta||, and transfers
to g with g_hat = f_hat*(1-e(q*alpha))/(1-e(q*beta)), so that
(I-T_alpha)f = (I-T_beta)g holds coefficientwise. Two certificates are
attached as certified interval comparisons:

  summable side   sum_k |g_hat(q_k)| <= (pi/2)*sum_k ||q_k*alpha||
                                     <= (pi/2)*sum_k q_k**-1/2
  obstruction     |h_hat(q_k)| = ||q_k*beta|| / (2*sin(pi*||q_k*beta||))
                  lies in [1/(2*pi), 1/4] for every k,

where h is the unique formal solution of f = (I-T_alpha)(I-T_beta)h. The
first shows the joint equation solves with summable coefficients; the second
shows the double solution's coefficients cannot tend to zero, which rules
out any L2 solution once the support is infinite (the truncation carries the
per-term witnesses; the limit statement is documentation).

Every certificate entry compares whole intervals: a comparison holds only
when the entire value enclosure sits on the required side of the entire
threshold enclosure. Non-strict comparisons accept exact endpoint equality,
so degenerate all-zero families stay trivially true.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
import numpy as np

from .certify import (
    Enclosure,
    PrecisionCapError,
    exp_enclosure,
    log_enclosure,
    pi_enclosure,
    separate,
    sin_pi_enclosure,
    sqrt_enclosure,
)
from .diophantine import (
    ApproximationRecord,
    _decimal_str,
    bad_pair_constant,
    convergents,
    dirichlet_pair_search,
    select_summable_lacunary,
)
from .errors import CertificationError, ConfigError, ShortfallError
from .fourier import (
    SparseFourierSeries,
    apply_difference,
    coefficient_magnitude_enclosure,
    fraction_to_mpf,
    mpf_to_fraction,
    transfer_coefficients,
    unit_phase,
)
from .surd import QuadraticSurd

Rational = Union[int, float, Fraction]

_BITS = 192
_DIST_CAP = 1 << 14

CERTIFICATE_KINDS = (
    "joint-upper-bound",
    "double-lower-bound",
    "membership",
    "divergence-witness",
)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CertificateEntry:
    """One certified comparison: value <op> threshold, or an annotation.

    Comparisons hold only when the whole value interval sits on the required
    side of the whole threshold interval. "info" and "assumption" entries
    carry no comparison and never fail; "assumption" additionally marks
    evidence that is finite-depth rather than analytic.
    """

    description: str
    value: Enclosure
    comparison: str = "info"
    threshold: Optional[Enclosure] = None

    def __post_init__(self):
        if self.comparison not in ("<=", "<", ">=", ">", "info", "assumption"):
            raise ValueError(f"unknown comparison {self.comparison!r}")
        if self.comparison in ("info", "assumption"):
            if self.threshold is not None:
                raise ValueError("annotations take no threshold")
        elif self.threshold is None:
            raise ValueError(f"comparison {self.comparison!r} needs a threshold")

    @property
    def satisfied(self) -> bool:
        if self.comparison in ("info", "assumption"):
            return True
        if self.comparison == "<=":
            return self.value.hi <= self.threshold.lo
        if self.comparison == "<":
            return self.value.hi < self.threshold.lo
        if self.comparison == ">=":
            return self.value.lo >= self.threshold.hi
        return self.value.lo > self.threshold.hi

    def render(self) -> str:
        lo = _decimal_str(self.value.lo, "down")
        hi = _decimal_str(self.value.hi, "up")
        if self.comparison in ("info", "assumption"):
            tag = "noted" if self.comparison == "assumption" else "value"
            return f"{self.description}: [{lo}, {hi}] ({tag})"
        tlo = _decimal_str(self.threshold.lo, "down")
        thi = _decimal_str(self.threshold.hi, "up")
        state = "ok" if self.satisfied else "FAILED"
        return (
            f"{self.description}: [{lo}, {hi}] "
            f"{self.comparison} [{tlo}, {thi}] ... {state}"
        )

    def to_json_dict(self) -> dict:
        payload = {
            "description": self.description,
            "value": _enclosure_json(self.value),
            "comparison": self.comparison,
            "satisfied": self.satisfied,
        }
        if self.threshold is not None:
            payload["threshold"] = _enclosure_json(self.threshold)
        return payload


@dataclass(frozen=True)
class Certificate:
    """A named chain of certified comparisons with an overall verdict."""

    kind: str
    entries: tuple[CertificateEntry, ...]

    def __post_init__(self):
        if self.kind not in CERTIFICATE_KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")

    @property
    def verdict(self) -> bool:
        return all(entry.satisfied for entry in self.entries)

    def render(self) -> str:
        head = f"[{self.kind}] verdict: {'PASS' if self.verdict else 'FAIL'}"
        return "\n".join([head] + ["  " + e.render() for e in self.entries])

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "entries": [e.to_json_dict() for e in self.entries],
        }


@dataclass(frozen=True)
class PartialSum:
    """A certified partial sum with its per-term ledger."""

    value: Enclosure
    terms: tuple[tuple[int, Enclosure], ...]


def _enclosure_json(enc: Enclosure) -> dict:
    return {
        "lo": _decimal_str(enc.lo, "down"),
        "hi": _decimal_str(enc.hi, "up"),
    }


# ---------------------------------------------------------------------------
# certified scalar helpers


def _tight_dist(x: QuadraticSurd, q: int) -> Enclosure:
    """Enclosure of ||q*x|| with relative width below 1e-32, inside (0, 1/2]."""
    dist = (x * q).dist_to_int()
    bits = 192
    while True:
        enc = dist.enclosure(bits)
        lo = max(enc.lo, Fraction(0))
        hi = min(enc.hi, Fraction(1, 2))
        if lo > 0 and hi - lo <= lo * Fraction(1, 10**32):
            return Enclosure(lo, hi)
        if bits >= _DIST_CAP:
            raise PrecisionCapError(f"||{q}*x|| unresolved at the hard cap")
        bits *= 2


def _half_sine(dist: Enclosure) -> Enclosure:
    """sin(pi*x) on a positive distance enclosure, kept strictly positive."""
    enc = sin_pi_enclosure(dist, _BITS)
    if enc.lo <= 0:
        raise CertificationError("sine enclosure lost positivity")
    return enc


def _double_coefficient_magnitude(dist_b: Enclosure) -> Enclosure:
    """|h_hat| = ||q*beta|| / (2*sin(pi*||q*beta||)) from a tight distance."""
    return dist_b / (2 * _half_sine(dist_b))


def _require(cert: Certificate, context: str) -> Certificate:
    """Guaranteed inequalities must certify; a failure is a precision bug."""
    if not cert.verdict:
        raise CertificationError(
            f"{context}: a mathematically guaranteed comparison failed\n"
            + cert.render()
        )
    return cert


# ---------------------------------------------------------------------------
# construction results


@dataclass(frozen=True)
class ConstructionResult:
    """A truncated construction with its inputs, solution, and certificates.

    tail_bound is the certified value of the geometric tail model
    (pi/2)*q_K**-1/2 * r/(1-r) with r = sqrt(q_{K-1}/q_K), standing in for
    the discarded infinite part of sum |g_hat|; the model assumption is
    recorded as a certificate annotation.
    """

    alpha: QuadraticSurd
    beta: QuadraticSurd
    f: SparseFourierSeries
    g: SparseFourierSeries
    q_sequence: tuple[ApproximationRecord, ...]
    certificates: tuple[Certificate, ...]
    tail_bound: Enclosure
    notes: tuple[str, ...] = ()

    @property
    def verdict(self) -> bool:
        return all(cert.verdict for cert in self.certificates)

    def to_json_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "q_sequence": [rec.q for rec in self.q_sequence],
            "f": self.f.to_json_dict(),
            "g": self.g.to_json_dict(),
            "certificates": [c.to_json_dict() for c in self.certificates],
            "tail_bound": _enclosure_json(self.tail_bound),
            "notes": list(self.notes),
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def render(self) -> str:
        lines = [
            f"alpha = {self.alpha}",
            f"beta  = {self.beta}",
            "q sequence: " + ", ".join(str(r.q) for r in self.q_sequence),
            "tail bound (geometric model): "
            + _decimal_str(self.tail_bound.hi, "up"),
        ]
        for note in self.notes:
            lines.append("note: " + note)
        for cert in self.certificates:
            lines.append(cert.render())
        return "\n".join(lines)


def _assemble_joint_not_double(
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    chosen: Sequence[ApproximationRecord],
    notes: tuple[str, ...],
) -> ConstructionResult:
    """Build f, g and both certificates over an already-selected q sequence."""
    pi = pi_enclosure(_BITS)
    half_pi = pi / 2

    dists_a = [_tight_dist(alpha, rec.q) for rec in chosen]
    dists_b = [_tight_dist(beta, rec.q) for rec in chosen]

    f = SparseFourierSeries(
        {rec.q: fraction_to_mpf(db.mid) for rec, db in zip(chosen, dists_b)}
    )
    g = transfer_coefficients(f, alpha, beta)

    # summable side: per-term |g_hat| = ||q*beta|| * sin(pi*||q*alpha||) / sin(pi*||q*beta||)
    g_total = Enclosure.point(0)
    dist_a_total = Enclosure.point(0)
    inv_sqrt_total = Enclosure.point(0)
    for rec, da, db in zip(chosen, dists_a, dists_b):
        g_total = g_total + db * _half_sine(da) / _half_sine(db)
        dist_a_total = dist_a_total + da
        inv_sqrt_total = inv_sqrt_total + sqrt_enclosure(Fraction(1, rec.q), _BITS)

    mid_link = half_pi * dist_a_total
    right_link = half_pi * inv_sqrt_total
    tail = _geometric_tail(chosen, half_pi)

    joint_cert = _require(
        Certificate(
            kind="joint-upper-bound",
            entries=(
                CertificateEntry(
                    "sum of |g_hat(q_k)| vs (pi/2) * sum of ||q_k*alpha||",
                    g_total,
                    "<=",
                    mid_link,
                ),
                CertificateEntry(
                    "(pi/2) * sum of ||q_k*alpha|| vs (pi/2) * sum of q_k**-1/2",
                    mid_link,
                    "<=",
                    right_link,
                ),
                CertificateEntry(
                    "sum of |g_hat(q_k)| vs (pi/2) * sum of q_k**-1/2",
                    g_total,
                    "<=",
                    right_link,
                ),
                CertificateEntry(
                    "discarded tail of sum |g_hat| under the geometric gap model",
                    tail,
                    "assumption",
                ),
            ),
        ),
        "joint upper bound",
    )

    lower = Enclosure.point(1) / (2 * pi)
    upper = Enclosure.point(Fraction(1, 4))
    double_entries = []
    for rec, db in zip(chosen, dists_b):
        h_mag = _double_coefficient_magnitude(db)
        double_entries.append(
            CertificateEntry(
                f"|h_hat({rec.q})| vs 1/(2*pi)", h_mag, ">=", lower
            )
        )
        double_entries.append(
            CertificateEntry(f"|h_hat({rec.q})| vs 1/4", h_mag, "<=", upper)
        )
    double_cert = _require(
        Certificate(kind="double-lower-bound", entries=tuple(double_entries)),
        "double lower bound",
    )

    return ConstructionResult(
        alpha=alpha,
        beta=beta,
        f=f,
        g=g,
        q_sequence=tuple(chosen),
        certificates=(joint_cert, double_cert),
        tail_bound=tail,
        notes=notes,
    )


def _geometric_tail(chosen: Sequence[ApproximationRecord], half_pi: Enclosure) -> Enclosure:
    """(pi/2) * q_K**-1/2 * r/(1-r) with r = sqrt(q_{K-1}/q_K)."""
    q_last = chosen[-1].q
    q_prev = chosen[-2].q
    r = sqrt_enclosure(Fraction(q_prev, q_last), _BITS)
    if r.hi >= 1:
        raise CertificationError("gap ratio enclosure must stay below 1")
    one_minus_r = Enclosure(1 - r.hi, 1 - r.lo)
    return half_pi * sqrt_enclosure(Fraction(1, q_last), _BITS) * r / one_minus_r


_BUDGET_CAP = Fraction(1024)


def build_joint_not_double(
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    K: int,
    Q: int,
    ratio: Rational = 2.0,
    budget: Rational = 2.0,
) -> ConstructionResult:
    """The flagship construction: K Dirichlet frequencies, f, g, certificates.

    Candidate denominators come from the certified simultaneous search up to
    Q; the greedy lacunary selection keeps sum q**-1/2 within the budget. If
    the default budget yields fewer than K terms it is doubled (the budget
    only gates selection; certificates always bound the realized sums), and
    each escalation is recorded in the result notes.
    """
    if K < 2:
        raise ConfigError("need at least two construction terms")
    records = dirichlet_pair_search(alpha, beta, Q)
    if len(records) < K:
        raise ShortfallError(
            f"only {len(records)} simultaneous Dirichlet denominators up to"
            f" {Q}, need {K}"
        )
    budget_f = Fraction(budget)
    notes: list[str] = []
    while True:
        try:
            selected = select_summable_lacunary(records, ratio, budget_f)
        except ShortfallError:
            selected = []
        if len(selected) >= K:
            break
        if budget_f >= _BUDGET_CAP:
            raise ShortfallError(
                f"selection yields {len(selected)} terms even at summability"
                f" budget {budget_f}; need {K}"
            )
        budget_f *= 2
        notes.append(f"summability budget escalated to {budget_f}")
    return _assemble_joint_not_double(
        alpha, beta, selected[:K], tuple(notes)
    )


def refine_lacunary(result: ConstructionResult, ratio: Rational) -> ConstructionResult:
    """Thin the q sequence to gap ratio >= ratio and rebuild certificates.

    The surviving subsequence carries an exact-rational lacunarity
    certificate; with the per-term obstruction witnesses it supports the
    no-measurable-double-solution conclusion (the limit argument itself is
    documentation, the computed content is the ratio check).
    """
    ratio_f = Fraction(ratio)
    if ratio_f <= 1:
        raise ConfigError("lacunarity ratio must exceed 1")
    kept = [result.q_sequence[0]]
    for rec in result.q_sequence[1:]:
        if Fraction(rec.q, kept[-1].q) >= ratio_f:
            kept.append(rec)
    if len(kept) < 2:
        raise ShortfallError(
            f"thinning to ratio {ratio_f} leaves {len(kept)} term(s)"
        )
    entries = [
        CertificateEntry(
            f"gap q={b.q} over q={a.q}",
            Enclosure.point(Fraction(b.q, a.q)),
            ">=",
            Enclosure.point(ratio_f),
        )
        for a, b in zip(kept, kept[1:])
    ]
    entries.append(
        CertificateEntry(
            "lacunary obstruction support: certified gaps plus nonvanishing"
            " |h_hat| rule out a measurable double solution in the limit",
            Enclosure.point(Fraction(len(kept))),
            "assumption",
        )
    )
    lac_cert = _require(
        Certificate(kind="divergence-witness", entries=tuple(entries)),
        "lacunarity",
    )
    rebuilt = _assemble_joint_not_double(
        result.alpha, result.beta, kept, result.notes
    )
    return ConstructionResult(
        alpha=rebuilt.alpha,
        beta=rebuilt.beta,
        f=rebuilt.f,
        g=rebuilt.g,
        q_sequence=rebuilt.q_sequence,
        certificates=rebuilt.certificates + (lac_cert,),
        tail_bound=rebuilt.tail_bound,
        notes=rebuilt.notes,
    )


# ---------------------------------------------------------------------------
# bad-pair families


def _certified_at_least(x: QuadraticSurd, y: QuadraticSurd, q: int) -> bool:
    """Whether ||q*y|| >= ||q*x||, settled exactly or by certified refinement."""
    dx = (x * q).dist_to_int()
    dy = (y * q).dist_to_int()
    if x.d == y.d:
        return (dy - dx).sign() >= 0
    try:
        return separate(dx.enclosure, dy.enclosure) < 0
    except PrecisionCapError:
        return False


def _sqrt_q_dist(beta: QuadraticSurd, q: int) -> Enclosure:
    return sqrt_enclosure(Fraction(q), _BITS) * _tight_dist(beta, q)


def build_bad_pair_family(
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    a: Sequence[float],
    Q: int,
) -> ConstructionResult:
    """Coefficient family on frequencies where the pair's badness is realized.

    Selects the first len(a) denominators q with ||q*beta|| >= ||q*alpha||
    and C/2 <= sqrt(q)*||q*beta|| <= 2C, where C is the finite-depth badness
    constant of the pair up to Q (recorded as an assumption, since the true
    liminf is not computable). Sets f_hat(q_k) = a_k, transfers to g, and
    certifies |g_hat(q_k)| <= (pi/2)|a_k| per term; the divergence witness
    records |h_hat(q_k)| >= |a_k|*sqrt(q_k)/(4*pi*C) per term.
    """
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    if Q < 1:
        raise ConfigError("Q must be positive")
    K = len(a)
    if K == 0:
        raise ConfigError("need at least one coefficient")
    c_enc, c_argmin = bad_pair_constant(alpha, beta, Q)
    C = c_enc.mid
    if C <= 0:
        raise ShortfallError("badness constant evidence is not positive")

    chosen_q = _select_family_frequencies(alpha, beta, Q, C, K)
    if len(chosen_q) < K:
        raise ShortfallError(
            f"only {len(chosen_q)} admissible frequencies up to {Q}, need {K}"
        )

    coeffs = {q: fraction_to_mpf(Fraction(a_k)) for q, a_k in zip(chosen_q, a)}
    f = SparseFourierSeries(coeffs)
    g = (
        transfer_coefficients(f, alpha, beta)
        if len(f)
        else SparseFourierSeries({})
    )

    pi = pi_enclosure(_BITS)
    a_fracs = [abs(Fraction(x)) for x in a]

    joint_entries = [
        CertificateEntry(
            f"finite-depth badness constant C over q <= {Q}"
            f" (argmin q = {c_argmin})",
            c_enc,
            "assumption",
        )
    ]
    witness_entries = [joint_entries[0]]
    g_total = Enclosure.point(0)
    a_total = Fraction(0)
    for q, a_k in zip(chosen_q, a_fracs):
        band = _sqrt_q_dist(beta, q)
        witness_entries.append(
            CertificateEntry(
                f"sqrt({q})*||{q}*beta|| vs C/2",
                band,
                ">=",
                Enclosure.point(C / 2),
            )
        )
        witness_entries.append(
            CertificateEntry(
                f"sqrt({q})*||{q}*beta|| vs 2C",
                band,
                "<=",
                Enclosure.point(2 * C),
            )
        )
        if a_k == 0:
            g_term = Enclosure.point(0)
            h_term = Enclosure.point(0)
        else:
            da = _tight_dist(alpha, q)
            db = _tight_dist(beta, q)
            g_term = a_k * _half_sine(da) / _half_sine(db)
            h_term = Enclosure.point(a_k) / (4 * _half_sine(da) * _half_sine(db))
        g_total = g_total + g_term
        a_total += a_k
        joint_entries.append(
            CertificateEntry(
                f"|g_hat({q})| vs (pi/2)*|a_k|",
                g_term,
                "<=",
                pi * a_k / 2,
            )
        )
        witness_entries.append(
            CertificateEntry(
                f"|h_hat({q})| vs |a_k|*sqrt({q})/(4*pi*C)",
                h_term,
                ">=",
                sqrt_enclosure(Fraction(q), _BITS) * a_k / (4 * pi * C),
            )
        )
    joint_entries.append(
        CertificateEntry(
            "sum of |g_hat| vs (pi/2) * sum of |a_k|",
            g_total,
            "<=",
            pi * a_total / 2,
        )
    )
    joint_cert = _require(
        Certificate(kind="joint-upper-bound", entries=tuple(joint_entries)),
        "bad-pair family joint bound",
    )
    witness_cert = Certificate(
        kind="divergence-witness", entries=tuple(witness_entries)
    )

    records = tuple(
        ApproximationRecord(
            q=q,
            dist_alpha=_tight_dist(alpha, q),
            dist_beta=_tight_dist(beta, q),
            quality=_sqrt_q_dist(beta, q),
        )
        for q in chosen_q
    )
    return ConstructionResult(
        alpha=alpha,
        beta=beta,
        f=f,
        g=g,
        q_sequence=records,
        certificates=(joint_cert, witness_cert),
        tail_bound=Enclosure.point(0),
        notes=("tail bound not applicable: caller supplies the coefficients",),
    )


def _select_family_frequencies(
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    Q: int,
    C: Fraction,
    K: int,
) -> list[int]:
    """First K certified frequencies for the family, via prefilter + proof.

    The float64 scan proposes q with ||q*beta|| >~ ||q*alpha|| and
    sqrt(q)*||q*beta|| inside the widened band [C/2 - m, 2C + m]; every
    proposal is then settled by exact or certified-interval comparison, so
    prefilter error can only cost extra confirmations, never a wrong accept.
    """
    from .diophantine import _float_fraction

    a_f = _float_fraction(alpha)
    b_f = _float_fraction(beta)
    margin = Q * 2.0**-49 + 2.0**-40
    lo_band = float(C) / 2
    hi_band = 2 * float(C)
    chosen: list[int] = []
    chunk = 1 << 20
    for start in range(1, Q + 1, chunk):
        stop = min(start + chunk - 1, Q)
        q = np.arange(start, stop + 1, dtype=np.float64)
        da = np.abs(q * a_f - np.rint(q * a_f))
        db = np.abs(q * b_f - np.rint(q * b_f))
        sq = np.sqrt(q)
        mask = (db >= da - margin) & (sq * db >= lo_band - sq * margin) & (
            sq * db <= hi_band + sq * margin
        )
        for qi in np.nonzero(mask)[0]:
            q_int = start + int(qi)
            if not _certified_at_least(alpha, beta, q_int):
                continue
            band = _sqrt_q_dist(beta, q_int)
            if band.lo >= C / 2 and band.hi <= 2 * C:
                chosen.append(q_int)
                if len(chosen) == K:
                    return chosen
    return chosen


# ---------------------------------------------------------------------------
# sufficient-condition checkers


def check_bad_joint(
    f: SparseFourierSeries,
    mode: str,
    badness_constant: Optional[Rational] = None,
) -> Certificate:
    """Summability evidence that f is a joint coboundary for any bad rotation.

    mode "C" evaluates sum |k|*|f_hat(k)| (continuous-solution route), mode
    "L2" evaluates sum k**2*|f_hat(k)|**2 (square-summable route), both
    exactly over the finite support. With a badness constant c for alpha,
    the C-mode sum also yields the solution bound sum |g_hat| <= value/(4c).
    """
    f.require_centered("joint summability data")
    if mode not in ("C", "L2"):
        raise ConfigError(f"mode must be 'C' or 'L2', got {mode!r}")
    entries = []
    if mode == "C":
        total = Enclosure.point(0)
        for n, c in f.items():
            total = total + abs(n) * coefficient_magnitude_enclosure(c)
        entries.append(
            CertificateEntry("sum over support of |k| * |f_hat(k)|", total)
        )
        if badness_constant is not None:
            c_frac = Fraction(badness_constant)
            if c_frac <= 0:
                raise ConfigError("badness constant must be positive")
            entries.append(
                CertificateEntry(
                    "implied bound on sum of |g_hat|: value/(4c)",
                    total / (4 * c_frac),
                )
            )
    else:
        exact = Fraction(0)
        for n, c in f.items():
            re = mpf_to_fraction(mpmath.re(c))
            im = mpf_to_fraction(mpmath.im(c))
            exact += n * n * (re * re + im * im)
        entries.append(
            CertificateEntry(
                "sum over support of k**2 * |f_hat(k)|**2 (exact)",
                Enclosure.point(exact),
            )
        )
    return Certificate(kind="membership", entries=tuple(entries))


def check_mur_envelope(
    a: Sequence[Rational],
    tail_bound: Optional[Rational] = None,
) -> Certificate:
    """Monotone-envelope summability: sum over k of k * a_k**2, exactly.

    The envelope must be positive and non-increasing (validated exactly on
    the supplied rationals); an optional caller-supplied analytic tail is
    recorded and added to the reported total.
    """
    if not a:
        raise ConfigError("envelope must be nonempty")
    vals = [Fraction(x) for x in a]
    if any(v < 0 for v in vals):
        raise ConfigError("envelope terms must be nonnegative")
    for prev, curr in zip(vals, vals[1:]):
        if curr > prev:
            raise ConfigError("envelope must be non-increasing")
    partial = sum((k * v * v for k, v in enumerate(vals, start=1)), Fraction(0))
    entries = [
        CertificateEntry(
            f"envelope of {len(vals)} terms verified non-increasing",
            Enclosure.point(Fraction(len(vals))),
        ),
        CertificateEntry(
            "partial sum of k * a_k**2 (exact)", Enclosure.point(partial)
        ),
    ]
    if tail_bound is not None:
        tail = Fraction(tail_bound)
        if tail < 0:
            raise ConfigError("tail bound must be nonnegative")
        entries.append(
            CertificateEntry(
                "caller-supplied analytic tail bound", Enclosure.point(tail)
            )
        )
        entries.append(
            CertificateEntry(
                "partial plus tail",
                Enclosure(partial, partial + tail),
            )
        )
    else:
        entries.append(
            CertificateEntry(
                "no analytic tail supplied; partial sum only, convergence"
                " of the full series is the caller's claim",
                Enclosure.point(partial),
            )
        )
    return Certificate(kind="membership", entries=tuple(entries))


def _log_power(k: int, gamma: Fraction, bits: int) -> Enclosure:
    """(log k)**gamma = exp(gamma * log(log k)) for integer k >= 2."""
    if k < 2:
        raise ValueError("log power needs k >= 2")
    if gamma == 0:
        return Enclosure.point(1)
    base = log_enclosure(k, bits)
    inner_lo = log_enclosure(base.lo, bits).lo
    inner_hi = log_enclosure(base.hi, bits).hi
    args = sorted((gamma * inner_lo, gamma * inner_hi))
    return Enclosure(
        exp_enclosure(args[0], bits).lo, exp_enclosure(args[1], bits).hi
    )


def check_double_bad(f: SparseFourierSeries, gamma: Rational) -> Certificate:
    """Decay evidence |f_hat(k)| <= M/(k**2 (log|k|)**gamma) with gamma > 1.

    Finds the smallest certified M over the support, then delegates the
    induced envelope a_k = M/(k (log k)**gamma) to the monotone-envelope
    check with the integral-test tail M**2 (log K)**(1-2*gamma)/(2*gamma-1).
    """
    f.require_centered("decay data")
    gamma_f = Fraction(gamma)
    if gamma_f <= 1:
        raise ConfigError("gamma must exceed 1")
    if any(abs(n) < 2 for n in f.support):
        raise ConfigError("support must avoid |k| < 2 for the log-power envelope")
    if not len(f):
        return Certificate(
            kind="membership",
            entries=(
                CertificateEntry("envelope constant M", Enclosure.point(0)),
                CertificateEntry(
                    "partial sum of k * a_k**2 (exact)", Enclosure.point(0)
                ),
            ),
        )
    m_enc = Enclosure.point(0)
    for n, c in f.items():
        k = abs(n)
        term = (
            coefficient_magnitude_enclosure(c)
            * (k * k)
            * _log_power(k, gamma_f, _BITS)
        )
        m_enc = Enclosure(max(m_enc.lo, term.lo), max(m_enc.hi, term.hi))
    m_entry = CertificateEntry(
        "envelope constant M = max |f_hat(k)| * k**2 * (log k)**gamma", m_enc
    )
    k_max = max(abs(n) for n in f.support)
    m_hi = m_enc.hi
    envelope = [
        (m_hi * Fraction(1, k)) * _log_power(k, -gamma_f, _BITS).hi
        for k in range(2, k_max + 1)
    ]
    tail_enc = (
        m_hi
        * m_hi
        * _log_power(k_max, 1 - 2 * gamma_f, _BITS).hi
        / (2 * gamma_f - 1)
    )
    delegated = check_mur_envelope(envelope, tail_bound=tail_enc)
    return Certificate(kind="membership", entries=(m_entry,) + delegated.entries)


# ---------------------------------------------------------------------------
# obstruction witnesses


def large_coeff_witness(
    f: SparseFourierSeries,
    beta: QuadraticSurd,
    depth: int,
    threshold: Rational = Fraction(1, 10),
) -> Certificate:
    """Non-decaying double-solution coefficients along convergent denominators.

    For each convergent denominator n of beta found in f's support, certifies
    n*||n*beta|| < 1 and records the witness |f_hat(n)|/(2*pi*||n*beta||),
    which therefore dominates |n*f_hat(n)|/(2*pi). The verdict requires every
    witness to exceed the caller threshold. Only magnitudes enter, so the
    witness is invariant under rotating every coefficient by a fixed phase.
    """
    beta.require_irrational("beta")
    if depth < 1:
        raise ConfigError("depth must be positive")
    threshold_f = Fraction(threshold)
    denominators = sorted({q for _, q in convergents(beta, depth)})
    support = set(f.support)
    hits = [n for n in denominators if n in support]
    if not hits:
        raise ShortfallError(
            "no convergent denominators of beta in the support"
        )
    pi = pi_enclosure(_BITS)
    entries = []
    for n in hits:
        dist = _tight_dist(beta, n)
        mag = coefficient_magnitude_enclosure(f.coeff(n))
        witness = mag / (2 * pi * dist)
        entries.append(
            CertificateEntry(
                f"n*||n*beta|| at n={n}", n * dist, "<", Enclosure.point(1)
            )
        )
        entries.append(
            CertificateEntry(
                f"|h_hat({n})| lower bound |f_hat|/(2*pi*||n*beta||)",
                witness,
                ">=",
                Enclosure.point(threshold_f),
            )
        )
        entries.append(
            CertificateEntry(
                f"same witness vs |n*f_hat(n)|/(2*pi)",
                witness,
                ">=",
                n * mag / (2 * pi),
            )
        )
    return Certificate(kind="divergence-witness", entries=tuple(entries))


def petersen_series(
    f: SparseFourierSeries, alpha: QuadraticSurd, beta: QuadraticSurd
) -> PartialSum:
    """Partial sum of |f_hat(n)|**2 * sin(pi*n*beta)**2 / sin(pi*n*alpha)**2.

    Diagnostic only: finiteness of the full series cannot be decided from a
    truncation, so the value is reported with its per-term ledger and no
    verdict.
    """
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    f.require_centered("series data")
    total = Enclosure.point(0)
    terms = []
    for n, c in f.items():
        mass = Enclosure.point(_mass_fraction(c))
        num = _half_sine(_tight_dist(beta, abs(n))).square()
        den = _half_sine(_tight_dist(alpha, abs(n))).square()
        term = mass * num / den
        terms.append((n, term))
        total = total + term
    return PartialSum(value=total, terms=tuple(terms))


def _mass_fraction(c) -> Fraction:
    re = mpf_to_fraction(mpmath.re(c))
    im = mpf_to_fraction(mpmath.im(c))
    return re * re + im * im


def kac_salem_series(
    magnitudes: Sequence[tuple[int, Rational]],
    x: QuadraticSurd,
) -> tuple[PartialSum, Enclosure]:
    """Partial sum of |phi_hat(k)| / |sin(pi*k*x)| plus the entropy sum.

    The entropy sum is sum |phi_hat(k)| * log(1/|phi_hat(k)|); zero
    magnitudes contribute zero to both sums. Partial sums only: almost-sure
    convergence statements attach to generic x, not to any specific one.
    """
    x.require_irrational("x")
    total = Enclosure.point(0)
    entropy = Enclosure.point(0)
    terms = []
    pairs = magnitudes.items() if hasattr(magnitudes, "items") else magnitudes
    for k, mag in pairs:
        if k == 0:
            raise ConfigError("magnitudes must avoid k = 0")
        mag_f = Fraction(mag)
        if mag_f < 0:
            raise ConfigError("magnitudes must be nonnegative")
        if mag_f == 0:
            continue
        term = Enclosure.point(mag_f) / _half_sine(_tight_dist(x, abs(k)))
        terms.append((k, term))
        total = total + term
        entropy = entropy + mag_f * log_enclosure(1 / mag_f, _BITS)
    return PartialSum(value=total, terms=tuple(terms)), entropy


# ---------------------------------------------------------------------------
# dependence lift


def common_generator(
    alpha: QuadraticSurd, dependence
) -> tuple[QuadraticSurd, int, int]:
    """gamma with alpha = k*gamma and beta = j*gamma modulo 1.

    From m*alpha + n*beta + p = 0 the pair rotates by powers of a single
    rotation: normalize the relation so the beta coefficient is negative and
    the alpha coefficient positive, then gamma = (alpha + s)/|n| with s the
    unique shift making beta a clean multiple. Returns (gamma, k, j) with
    k = |n| (so T_alpha = T_gamma**k) and j = m (so T_beta = T_gamma**j).
    """
    m, n, p = dependence.m, dependence.n, dependence.p
    if n > 0 or (n == 0):
        m, n, p = -m, -n, -p
    if n == 0 or m <= 0:
        raise ConfigError(
            "dependence must relate both rotations with opposite signs"
        )
    k = -n
    if math.gcd(m, k) != 1:
        raise ConfigError("dependence coefficients must be coprime")
    s = (p * pow(m, -1, k)) % k
    gamma = (alpha + s) / k
    return gamma, k, m


def power_lift_joint(
    u_x: SparseFourierSeries,
    u_y: SparseFourierSeries,
    gamma: QuadraticSurd,
    k: int,
    j: int,
    tol: float = 1e-12,
) -> SparseFourierSeries:
    """Lift a joint coboundary of (T_gamma, T_gamma**j) to (T_gamma**k, T_gamma**j).

    Requires (I - T_gamma) u_x = (I - T_gamma**j) u_y within tol, making
    u = (I - T_gamma) u_x a joint coboundary of the base pair. Returns
    v = sum over n < k of T_gamma**n u, which telescopes to (I - T_gamma**k) u_x;
    both representations are computed and must agree (an exact identity, so a
    mismatch is a precision bug).
    """
    gamma.require_irrational("gamma")
    if k < 1 or j < 1:
        raise ConfigError("powers must be positive")
    u = apply_difference(u_x, gamma)
    other = apply_difference(u_y, gamma * j)
    scale = max(1.0, u_x.l2_norm(), u_y.l2_norm())
    if _max_abs_diff(u, other) > tol * scale:
        raise ValueError(
            "precondition failed: (I - T_gamma) u_x differs from"
            " (I - T_gamma**j) u_y beyond tolerance"
        )
    with mpmath.mp.workprec(160):
        data = {}
        for nu, c in u.items():
            phase_sum = mpmath.mpc(0)
            for n_pow in range(k):
                phase_sum += unit_phase(gamma, n_pow * nu)
            data[nu] = c * phase_sum
        v = SparseFourierSeries(data, u.real_valued)
    telescoped = apply_difference(u_x, gamma * k)
    if _max_abs_diff(v, telescoped) > 1e-24 * max(1.0, u_x.l2_norm()) * k:
        raise CertificationError(
            "telescoped lift disagrees with the summed representation"
        )
    return v


def _max_abs_diff(f: SparseFourierSeries, g: SparseFourierSeries) -> float:
    worst = 0.0
    for n in set(f.support) | set(g.support):
        worst = max(worst, abs(complex(f.coeff(n)) - complex(g.coeff(n))))
    return worst
