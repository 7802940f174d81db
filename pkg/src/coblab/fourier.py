"""Sparse Fourier series on the circle under rotation operators.

A rotation by alpha acts on the n-th coefficient as multiplication by
e(n*alpha) = exp(2*pi*i*n*alpha). Coefficients live at a fixed working
precision of 128 bits (mpmath), with phases built from exactly reduced
arguments: frac(n*alpha) comes out of a 192-bit fixed-point reducer, so the
only error is the final rounding and the per-operation relative error stays
below 1e-30 throughout the supported desk scale. Certified interval
statements (small-divisor reports) are produced separately with the exact
kernel; the midpoint arithmetic here never feeds a certificate directly.

Ergodic-sum diagnostics reduce their arguments exactly and evaluate the
Dirichlet kernel D(n, x) = |sin(pi*n*x)/sin(pi*x)| in float64; with exact
reduction the relative error is a few 1e-15, far inside the 1e-9 tolerances
these diagnostics are quoted at.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

import mpmath
from mpmath import mp

from .certify import Enclosure, sin_pi_enclosure, sqrt_enclosure
from .errors import PrecisionCapError
from .surd import FixedPointReducer, QuadraticSurd

WORK_PREC = 128
_GUARD = 12
_REDUCER_BITS = 192
TRACKED_REL_ERROR = 1e-30

Rational = Union[int, float, Fraction]


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of a finite mpf (mpf values are dyadic).

    Reads the mantissa directly: the mpf constructor would re-round its
    argument to the ambient precision, which silently truncates values
    stored at the working precision.
    """
    mpf_tuple = getattr(x, "_mpf_", None)
    if mpf_tuple is None:
        with mp.workprec(WORK_PREC + _GUARD):
            mpf_tuple = mpmath.mpf(x)._mpf_
    sign, man, exp, _ = mpf_tuple
    if man == 0:
        if x == 0:
            return Fraction(0)
        raise ValueError("cannot convert a nonfinite value")
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def fraction_to_mpf(value: Fraction):
    """Nearest working-precision mpf to an exact rational."""
    with mp.workprec(WORK_PREC + _GUARD):
        return mpmath.mpf(value.numerator) / value.denominator


@lru_cache(maxsize=64)
def _reducer(alpha: QuadraticSurd) -> FixedPointReducer:
    return FixedPointReducer(alpha, bits=_REDUCER_BITS)


@lru_cache(maxsize=1 << 16)
def _phase(alpha: QuadraticSurd, n: int):
    """e(n*alpha) at working precision for n > 0, from an exact residue."""
    red = _reducer(alpha)
    t = red.frac_fixed(n)
    with mp.workprec(WORK_PREC + _GUARD):
        arg = 2 * mp.pi * mpmath.ldexp(mpmath.mpf(t), -red.bits)
        return mpmath.mpc(mpmath.cos(arg), mpmath.sin(arg))


def unit_phase(alpha: QuadraticSurd, n: int):
    """e(n*alpha) as a working-precision complex number, any integer n."""
    if n == 0:
        return mpmath.mpc(1)
    if n > 0:
        return _phase(alpha, n)
    with mp.workprec(WORK_PREC + _GUARD):
        # exact at working precision, so phases stay conjugate-symmetric
        return mpmath.conj(_phase(alpha, -n))


def _one_minus_phase(alpha: QuadraticSurd, n: int):
    with mp.workprec(WORK_PREC + _GUARD):
        return 1 - unit_phase(alpha, n)


class SparseFourierSeries:
    """A finitely supported Fourier series, indexed by integer frequencies.

    Zero coefficients are dropped; when real_valued is set, conjugate
    symmetry coeff(-n) == conj(coeff(n)) is validated exactly (phase tables
    are built symmetrically, so the symmetry survives every operation here).
    """

    __slots__ = ("_coeffs", "real_valued")

    def __init__(
        self,
        coefficients: Mapping[int, complex],
        real_valued: bool = False,
    ):
        data = {}
        with mp.workprec(WORK_PREC + _GUARD):
            for n, value in coefficients.items():
                c = mpmath.mpc(value)
                if c != 0:
                    data[int(n)] = c
            if real_valued:
                # conj is exact here: stored mantissas fit the working precision
                for n, c in data.items():
                    mirror = data.get(-n, mpmath.mpc(0))
                    if mirror != mpmath.conj(c):
                        raise ValueError(
                            f"real_valued series needs conjugate symmetry at n={n}"
                        )
        object.__setattr__(self, "_coeffs", data)
        object.__setattr__(self, "real_valued", real_valued)

    def __setattr__(self, name, value):
        raise AttributeError("SparseFourierSeries is immutable")

    # -- access ---------------------------------------------------------------

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._coeffs))

    def coeff(self, n: int):
        return self._coeffs.get(n, mpmath.mpc(0))

    def items(self):
        for n in sorted(self._coeffs):
            yield n, self._coeffs[n]

    def __len__(self) -> int:
        return len(self._coeffs)

    def is_centered(self) -> bool:
        return 0 not in self._coeffs

    def require_centered(self, what: str = "series") -> "SparseFourierSeries":
        if not self.is_centered():
            raise ValueError(f"{what} must have zero mean (no 0-frequency term)")
        return self

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other: "SparseFourierSeries") -> "SparseFourierSeries":
        with mp.workprec(WORK_PREC + _GUARD):
            data = dict(self._coeffs)
            for n, c in other._coeffs.items():
                data[n] = data.get(n, mpmath.mpc(0)) + c
        return SparseFourierSeries(data, self.real_valued and other.real_valued)

    def __sub__(self, other: "SparseFourierSeries") -> "SparseFourierSeries":
        return self + other.scale(-1)

    def scale(self, factor) -> "SparseFourierSeries":
        with mp.workprec(WORK_PREC + _GUARD):
            s = mpmath.mpc(factor)
            data = {n: c * s for n, c in self._coeffs.items()}
        keeps_real = self.real_valued and mpmath.im(s) == 0
        return SparseFourierSeries(data, keeps_real)

    # -- norms ------------------------------------------------------------------

    def l2_norm_sq_exact(self) -> Fraction:
        """Exact Parseval mass: coefficients are dyadic, so this is a Fraction."""
        total = Fraction(0)
        for _, c in self._coeffs.items():
            re = mpf_to_fraction(mpmath.re(c))
            im = mpf_to_fraction(mpmath.im(c))
            total += re * re + im * im
        return total

    def l2_norm(self) -> float:
        return math.sqrt(float(self.l2_norm_sq_exact()))

    def l1_norm(self) -> float:
        with mp.workprec(WORK_PREC + _GUARD):
            return float(mpmath.fsum(abs(c) for c in self._coeffs.values()))

    # -- serialization -------------------------------------------------------------

    def to_csv(self, fileobj) -> None:
        writer = csv.writer(fileobj)
        writer.writerow(["n", "re", "im"])
        for n, c in self.items():
            writer.writerow(
                [n, mpmath.nstr(mpmath.re(c), 36), mpmath.nstr(mpmath.im(c), 36)]
            )

    @classmethod
    def from_csv(cls, fileobj, real_valued: bool = False) -> "SparseFourierSeries":
        reader = csv.reader(fileobj)
        header = next(reader)
        if header[:3] != ["n", "re", "im"]:
            raise ValueError(f"unexpected series header {header}")
        data = {}
        with mp.workprec(WORK_PREC + _GUARD):
            for row in reader:
                if not row:
                    continue
                data[int(row[0])] = mpmath.mpc(mpmath.mpf(row[1]), mpmath.mpf(row[2]))
        return cls(data, real_valued)

    def to_json_dict(self) -> dict:
        return {
            "real_valued": self.real_valued,
            "coefficients": [
                [n, mpmath.nstr(mpmath.re(c), 36), mpmath.nstr(mpmath.im(c), 36)]
                for n, c in self.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, payload: dict) -> "SparseFourierSeries":
        with mp.workprec(WORK_PREC + _GUARD):
            data = {
                int(n): mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
                for n, re, im in payload["coefficients"]
            }
        return cls(data, bool(payload.get("real_valued", False)))

    @classmethod
    def from_json(cls, text: str) -> "SparseFourierSeries":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class SmallDivisorEntry:
    """Certified data for one frequency of a coboundary solve."""

    n: int
    divisor: Enclosure  # |1 - e(n*alpha)| (or the product for double solves)
    magnitude: Enclosure  # |solution coefficient|


@dataclass(frozen=True)
class SmallDivisorReport:
    entries: tuple[SmallDivisorEntry, ...]
    contains_zero: bool

    def smallest_divisor(self) -> Fraction:
        return min(e.divisor.lo for e in self.entries) if self.entries else Fraction(0)


def _positive_dist_enclosure(alpha: QuadraticSurd, n: int, tol: Fraction) -> Enclosure:
    """Enclosure of ||n*alpha|| refined until strictly positive and tight."""
    dist = (alpha * abs(n)).dist_to_int()
    bits = 128
    while True:
        enc = dist.enclosure(bits)
        lo = max(enc.lo, Fraction(0))
        hi = min(enc.hi, Fraction(1, 2))
        if lo > 0 and hi - lo <= tol:
            return Enclosure(lo, hi)
        if bits >= 1 << 14:
            raise PrecisionCapError(f"||{n}*alpha|| unresolved at the hard cap")
        bits *= 2


def divisor_enclosure(alpha: QuadraticSurd, n: int, tol: Rational = Fraction(1, 10**15)) -> Enclosure:
    """Certified |1 - e(n*alpha)| = 2*sin(pi*||n*alpha||) for n != 0."""
    if n == 0:
        raise ValueError("the zero frequency has no divisor")
    tol_f = Fraction(tol)
    dist = _positive_dist_enclosure(alpha, n, tol_f / 8)
    return 2 * sin_pi_enclosure(dist, 192)


def _magnitude_sq_fraction(c) -> Fraction:
    re = mpf_to_fraction(mpmath.re(c))
    im = mpf_to_fraction(mpmath.im(c))
    return re * re + im * im


def coefficient_magnitude_enclosure(c, bits: int = 160) -> Enclosure:
    """Certified |c| for a working-precision coefficient, taken as exact input."""
    return sqrt_enclosure(_magnitude_sq_fraction(c), bits)


# ---------------------------------------------------------------------------
# rotation workflows


def apply_rotation(f: SparseFourierSeries, alpha: QuadraticSurd) -> SparseFourierSeries:
    """Compose with the rotation by alpha: coefficient n picks up e(n*alpha)."""
    alpha.require_irrational("alpha")
    with mp.workprec(WORK_PREC + _GUARD):
        data = {n: c * unit_phase(alpha, n) for n, c in f._coeffs.items()}
    return SparseFourierSeries(data, f.real_valued)


def apply_difference(f: SparseFourierSeries, alpha: QuadraticSurd) -> SparseFourierSeries:
    """(I - T_alpha) f, the coboundary of f under the rotation by alpha."""
    alpha.require_irrational("alpha")
    with mp.workprec(WORK_PREC + _GUARD):
        data = {
            n: c * (1 - unit_phase(alpha, n)) for n, c in f._coeffs.items()
        }
    return SparseFourierSeries(data, f.real_valued)


def solve_coboundary(
    f: SparseFourierSeries,
    alpha: QuadraticSurd,
    tol: Rational = Fraction(1, 10**12),
) -> tuple[SparseFourierSeries, SmallDivisorReport]:
    """Solve f = (I - T_alpha) g for g, with a certified small-divisor report.

    The input must be centered. Divisor enclosures are refined until they
    exclude zero (always possible for irrational alpha), so contains_zero is
    False on every report this function returns.
    """
    alpha.require_irrational("alpha")
    f.require_centered("coboundary data")
    tol_f = Fraction(tol)
    data = {}
    entries = []
    with mp.workprec(WORK_PREC + _GUARD):
        for n, c in f._coeffs.items():
            g_n = c / _one_minus_phase(alpha, n)
            data[n] = g_n
            div = divisor_enclosure(alpha, n, tol_f)
            mag = coefficient_magnitude_enclosure(c) / div
            entries.append(SmallDivisorEntry(n=n, divisor=div, magnitude=mag))
    entries.sort(key=lambda e: e.n)
    report = SmallDivisorReport(entries=tuple(entries), contains_zero=False)
    return SparseFourierSeries(data, f.real_valued), report


def transfer_coefficients(
    f: SparseFourierSeries, alpha: QuadraticSurd, beta: QuadraticSurd
) -> SparseFourierSeries:
    """g with g_hat(n) = f_hat(n) * (1 - e(n*alpha)) / (1 - e(n*beta)).

    When f = (I - T_alpha) u this is the transfer making (I - T_alpha) f_tilde
    match: it solves (I - T_beta) g = (I - T_alpha) f coefficientwise.
    """
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    f.require_centered("transfer data")
    with mp.workprec(WORK_PREC + _GUARD):
        data = {
            n: c * _one_minus_phase(alpha, n) / _one_minus_phase(beta, n)
            for n, c in f._coeffs.items()
        }
    return SparseFourierSeries(data, f.real_valued)


def double_solve(
    f: SparseFourierSeries,
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    tol: Rational = Fraction(1, 10**12),
) -> tuple[SparseFourierSeries, SmallDivisorReport]:
    """Solve f = (I - T_alpha)(I - T_beta) h, reporting the divisor products."""
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    f.require_centered("double-coboundary data")
    tol_f = Fraction(tol)
    data = {}
    entries = []
    with mp.workprec(WORK_PREC + _GUARD):
        for n, c in f._coeffs.items():
            h_n = c / (_one_minus_phase(alpha, n) * _one_minus_phase(beta, n))
            data[n] = h_n
            div = divisor_enclosure(alpha, n, tol_f) * divisor_enclosure(beta, n, tol_f)
            mag = coefficient_magnitude_enclosure(c) / div
            entries.append(SmallDivisorEntry(n=n, divisor=div, magnitude=mag))
    entries.sort(key=lambda e: e.n)
    report = SmallDivisorReport(entries=tuple(entries), contains_zero=False)
    return SparseFourierSeries(data, f.real_valued), report


# ---------------------------------------------------------------------------
# ergodic sums


def _dirichlet_kernel_sq(red: FixedPointReducer, nu: int, n: int) -> float:
    """D(n, nu*x)**2 with exact argument reduction; D(n, 0 mod 1) = n."""
    if nu == 0:
        return float(n) * float(n)
    num = math.sin(math.pi * red.dist_float(n * nu))
    den = math.sin(math.pi * red.dist_float(nu))
    ratio = num / den
    return ratio * ratio


def double_ergodic_sum_norm(
    f: SparseFourierSeries,
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    n: int,
    m: int,
) -> float:
    """L2 norm of sum_{k<n} sum_{j<m} T_alpha^k T_beta^j f.

    Parseval turns the double sum into Dirichlet kernel factors
    |f_hat(nu)|^2 * D(n, nu*alpha)^2 * D(m, nu*beta)^2 per frequency.
    """
    if n < 1 or m < 1:
        raise ValueError("sum lengths must be positive")
    red_a = _reducer(alpha.require_irrational("alpha"))
    red_b = _reducer(beta.require_irrational("beta"))
    total = 0.0
    for nu, c in f._coeffs.items():
        weight = abs(complex(c)) ** 2
        total += weight * _dirichlet_kernel_sq(red_a, nu, n) * _dirichlet_kernel_sq(
            red_b, nu, m
        )
    return math.sqrt(total)


def browder_sum_norm(f: SparseFourierSeries, alpha: QuadraticSurd, n: int) -> float:
    """L2 norm of sum_{k<n} T_alpha^k f, the one-rotation ergodic sum."""
    if n < 1:
        raise ValueError("sum length must be positive")
    red = _reducer(alpha.require_irrational("alpha"))
    total = 0.0
    for nu, c in f._coeffs.items():
        weight = abs(complex(c)) ** 2
        total += weight * _dirichlet_kernel_sq(red, nu, n)
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# test and experiment inputs


def random_real_series(
    seed: int,
    max_freq: int,
    unit_l2: bool = True,
    centered: bool = True,
) -> SparseFourierSeries:
    """Deterministic real-valued trigonometric polynomial with full support.

    Coefficients for n = 1..max_freq are uniform in the unit square, mirrored
    conjugately; optionally normalized to unit Parseval norm.
    """
    rng = random.Random(seed)
    data: dict[int, complex] = {}
    for n in range(1, max_freq + 1):
        re = rng.uniform(-1.0, 1.0)
        im = rng.uniform(-1.0, 1.0)
        data[n] = complex(re, im)
        data[-n] = complex(re, -im)
    if not centered:
        data[0] = complex(rng.uniform(-1.0, 1.0), 0.0)
    series = SparseFourierSeries(data, real_valued=True)
    if unit_l2:
        norm = series.l2_norm()
        series = series.scale(1.0 / norm)
    return series
