"""Atomic spectral measures and ergodic-rate diagnostics for rotation pairs.

Two commuting irrational rotations diagonalize together in the Fourier
basis, so the spectral measure of a trigonometric polynomial is purely
atomic: one atom per supported frequency n, sitting at the pair of
eigenvalues (e(n*alpha), e(n*beta)) with mass |f_hat(n)|**2. Membership of
f in the range of (I - T_alpha), of (I - T_beta), or of their product then
reduces to weighted sums over atoms with certified divisor enclosures
|1 - e(n*x)|**2 = 4*sin(pi*||n*x||)**2.

Everything here reports partial sums over the finite atom set. Divergence
of an infinite criterion integral is never claimed from a truncation; what
can be certified is that a partial sum already exceeds a threshold, or that
each atom contributes at least an analytic floor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .certify import Enclosure
from .diophantine import _decimal_str
from .errors import CertificationError, ConfigError
from .fourier import (
    SparseFourierSeries,
    divisor_enclosure,
    double_ergodic_sum_norm,
    mpf_to_fraction,
)
from .surd import QuadraticSurd

# product table of doubling/tripling exponents is quadratic in n
_VARIANCE_CAP = 256


@dataclass(frozen=True)
class Atom:
    """One spectral atom: frequency, exact mass, certified divisor squares."""

    n: int
    mass: Fraction
    div_alpha_sq: Enclosure
    div_beta_sq: Enclosure


@dataclass(frozen=True)
class AtomicSpectralMeasure:
    """Spectral measure of a trigonometric polynomial under a rotation pair.

    Atoms are kept sorted by (|n|, n) so that every reduction over them is
    reproducible. Total mass equals the squared L2 norm exactly (Parseval
    on the finite support).
    """

    alpha: QuadraticSurd
    beta: QuadraticSurd
    atoms: tuple[Atom, ...]

    def __len__(self) -> int:
        return len(self.atoms)

    def total_mass(self) -> Fraction:
        return sum((atom.mass for atom in self.atoms), Fraction(0))

    def mass_at_zero(self) -> Fraction:
        for atom in self.atoms:
            if atom.n == 0:
                return atom.mass
        return Fraction(0)


@dataclass(frozen=True)
class CriterionSum:
    """A certified partial criterion sum with its per-atom ledger.

    divergent marks a nonzero mass at frequency 0, where the integrand has
    a zero divisor; the value then covers only the finite atoms and the
    verdict of any membership reading is negative by inspection.
    """

    value: Enclosure
    divergent: bool
    terms: tuple[tuple[int, Enclosure], ...]


def _coefficient_mass(c) -> Fraction:
    re = mpf_to_fraction(mpmath.re(c))
    im = mpf_to_fraction(mpmath.im(c))
    return re * re + im * im


def spectral_measure(
    f: SparseFourierSeries, alpha: QuadraticSurd, beta: QuadraticSurd
) -> AtomicSpectralMeasure:
    """Diagonalize f against the rotation pair: one atom per frequency."""
    alpha.require_irrational("alpha")
    beta.require_irrational("beta")
    atoms = []
    for n in sorted(f.support, key=lambda m: (abs(m), m)):
        mass = _coefficient_mass(f.coeff(n))
        if mass == 0:
            continue
        if n == 0:
            da_sq = Enclosure.point(0)
            db_sq = Enclosure.point(0)
        else:
            da_sq = divisor_enclosure(alpha, n).square()
            db_sq = divisor_enclosure(beta, n).square()
        atoms.append(Atom(n=n, mass=mass, div_alpha_sq=da_sq, div_beta_sq=db_sq))
    return AtomicSpectralMeasure(alpha=alpha, beta=beta, atoms=tuple(atoms))


def coboundary_integral(
    m: AtomicSpectralMeasure, which: str
) -> CriterionSum:
    """Partial sum of mass / |1 - e(n*x)|**2 over atoms, x = alpha or beta.

    Finiteness of this integral is the one-sided coboundary criterion; an
    atom at frequency 0 makes it infinite, reported through the divergent
    flag rather than by raising.
    """
    if which not in ("alpha", "beta"):
        raise ConfigError(f"which must be 'alpha' or 'beta', got {which!r}")
    total = Enclosure.point(0)
    divergent = False
    terms = []
    for atom in m.atoms:
        if atom.n == 0:
            divergent = True
            continue
        div_sq = atom.div_alpha_sq if which == "alpha" else atom.div_beta_sq
        term = Enclosure.point(atom.mass) / div_sq
        terms.append((atom.n, term))
        total = total + term
    return CriterionSum(value=total, divergent=divergent, terms=tuple(terms))


def joint_criterion_sum(m: AtomicSpectralMeasure) -> CriterionSum:
    """Partial sum of mass * (d_a + d_b) / (d_a * d_b) over atoms.

    Algebraically this is the sum of the two one-sided integrals; both
    routes are computed and must agree, so a drift between them signals a
    precision bug rather than a mathematical possibility.
    """
    total = Enclosure.point(0)
    divergent = False
    terms = []
    for atom in m.atoms:
        if atom.n == 0:
            divergent = True
            continue
        da, db = atom.div_alpha_sq, atom.div_beta_sq
        term = (atom.mass * (da + db)) / (da * db)
        terms.append((atom.n, term))
        total = total + term
    alpha_side = coboundary_integral(m, "alpha")
    beta_side = coboundary_integral(m, "beta")
    recombined = alpha_side.value + beta_side.value
    scale = max(float(recombined.hi), 1.0)
    if abs(float(total.mid) - float(recombined.mid)) > 1e-12 * scale:
        raise CertificationError(
            "joint criterion sum drifted from the sum of its one-sided parts"
        )
    return CriterionSum(value=total, divergent=divergent, terms=tuple(terms))


def double_criterion_sum(m: AtomicSpectralMeasure) -> CriterionSum:
    """Partial sum of mass / (d_a * d_b) over atoms, the product criterion.

    The per-atom ledger is the content: for atoms produced by the main
    construction each term sits above 1/(4*pi**2), so the partial sums grow
    at least linearly in the atom count.
    """
    total = Enclosure.point(0)
    divergent = False
    terms = []
    for atom in m.atoms:
        if atom.n == 0:
            divergent = True
            continue
        term = Enclosure.point(atom.mass) / (atom.div_alpha_sq * atom.div_beta_sq)
        terms.append((atom.n, term))
        total = total + term
    return CriterionSum(value=total, divergent=divergent, terms=tuple(terms))


def cesaro_rate_profile(
    f: SparseFourierSeries,
    alpha: QuadraticSurd,
    beta: QuadraticSurd,
    n_values: Sequence[int],
) -> list[tuple[int, float, float]]:
    """Double ergodic averages at the requested lengths, two normalizations.

    Returns (n, ||S_n||/n, ||S_n||/n**2) with S_n the unnormalized double
    sum over the n-by-n block of rotation powers. Values are reported at
    the tested lengths in increasing order and nothing is extrapolated.
    """
    if not n_values:
        raise ConfigError("need at least one length")
    cleaned = sorted(set(int(n) for n in n_values))
    if cleaned[0] < 1:
        raise ConfigError("lengths must be positive")
    profile = []
    for n in cleaned:
        norm = double_ergodic_sum_norm(f, alpha, beta, n, n)
        profile.append((n, norm / n, norm / n**2))
    return profile


def doubling_tripling_variance(n: int) -> Fraction:
    """Exact variance of the n-by-n double average under doubling/tripling.

    The orbit of a single harmonic under x -> 2x and x -> 3x runs through
    the exponents 2**k * 3**j, which are pairwise distinct (verified here
    by exact integer comparison, not assumed). Orthogonality then gives
    ||(1/n) * sum over the block||**2 = n**2 / n**2 = 1, exactly.
    """
    if n < 1:
        raise ConfigError("n must be positive")
    if n > _VARIANCE_CAP:
        raise ConfigError(
            f"n = {n} would tabulate {n * n} exponents; cap is {_VARIANCE_CAP}"
        )
    exponents = {2**k * 3**j for k in range(n) for j in range(n)}
    if len(exponents) != n * n:
        raise CertificationError(
            "doubling/tripling exponents collided; unique factorization"
            " says this cannot happen"
        )
    return Fraction(n * n, n * n)


def criterion_to_csv(cs: CriterionSum, fileobj) -> None:
    """Per-atom certified terms with outward-rounded decimal endpoints."""
    writer = csv.writer(fileobj)
    writer.writerow(["n", "value_lo", "value_hi"])
    for n, term in cs.terms:
        writer.writerow(
            [n, _decimal_str(term.lo, "down"), _decimal_str(term.hi, "up")]
        )


def profile_to_csv(
    profile: Iterable[tuple[int, float, float]],
    fileobj,
    which: str = "n",
) -> None:
    """Rate-profile rows; float64 diagnostics, so lo and hi coincide."""
    if which not in ("n", "n_sq"):
        raise ConfigError(f"which must be 'n' or 'n_sq', got {which!r}")
    writer = csv.writer(fileobj)
    writer.writerow(["n", "value_lo", "value_hi"])
    for n, per_n, per_n_sq in profile:
        value = repr(per_n if which == "n" else per_n_sq)
        writer.writerow([n, value, value])
