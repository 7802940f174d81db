"""Certified joint and double coboundaries of commuting circle rotations.

The package builds explicit trigonometric series that are simultaneous
coboundaries for two rotations while provably escaping the doubled
equation, certifies every inequality with rational interval arithmetic,
and ships the supporting Diophantine searches, spectral-measure criteria,
ergodic-rate diagnostics, and a lattice shift counterpart.
"""

__version__ = "0.1.0"

from .certify import Enclosure
from .constructions import (
    Certificate,
    CertificateEntry,
    ConstructionResult,
    PartialSum,
    build_bad_pair_family,
    build_joint_not_double,
    check_bad_joint,
    check_double_bad,
    check_mur_envelope,
    common_generator,
    kac_salem_series,
    large_coeff_witness,
    petersen_series,
    power_lift_joint,
    refine_lacunary,
)
from .diophantine import (
    ApproximationRecord,
    BadnessProfile,
    Dependence,
    bad_pair_constant,
    badness_profile,
    continued_fraction,
    convergents,
    dirichlet_pair_search,
    integer_dependence_search,
    select_summable_lacunary,
    square_approximation_search,
    summability_enclosure,
)
from .errors import (
    CertificationError,
    CoblabError,
    ConfigError,
    PrecisionCapError,
    ShortfallError,
)
from .fourier import (
    SparseFourierSeries,
    apply_difference,
    apply_rotation,
    browder_sum_norm,
    double_ergodic_sum_norm,
    double_solve,
    random_real_series,
    solve_coboundary,
    transfer_coefficients,
)
from .shift_example import (
    DivergenceReport,
    LatticeFunction,
    build_h,
    build_q,
    divergence_certificate,
    lp_partial_norm,
)
from .spectral import (
    AtomicSpectralMeasure,
    cesaro_rate_profile,
    coboundary_integral,
    double_criterion_sum,
    doubling_tripling_variance,
    joint_criterion_sum,
    spectral_measure,
)
from .surd import QuadraticSurd, parse_surd

__all__ = [
    "__version__",
    "Enclosure",
    "Certificate",
    "CertificateEntry",
    "ConstructionResult",
    "PartialSum",
    "build_bad_pair_family",
    "build_joint_not_double",
    "check_bad_joint",
    "check_double_bad",
    "check_mur_envelope",
    "common_generator",
    "kac_salem_series",
    "large_coeff_witness",
    "petersen_series",
    "power_lift_joint",
    "refine_lacunary",
    "ApproximationRecord",
    "BadnessProfile",
    "Dependence",
    "bad_pair_constant",
    "badness_profile",
    "continued_fraction",
    "convergents",
    "dirichlet_pair_search",
    "integer_dependence_search",
    "select_summable_lacunary",
    "square_approximation_search",
    "summability_enclosure",
    "CertificationError",
    "CoblabError",
    "ConfigError",
    "PrecisionCapError",
    "ShortfallError",
    "SparseFourierSeries",
    "apply_difference",
    "apply_rotation",
    "browder_sum_norm",
    "double_ergodic_sum_norm",
    "double_solve",
    "random_real_series",
    "solve_coboundary",
    "transfer_coefficients",
    "DivergenceReport",
    "LatticeFunction",
    "build_h",
    "build_q",
    "divergence_certificate",
    "lp_partial_norm",
    "AtomicSpectralMeasure",
    "cesaro_rate_profile",
    "coboundary_integral",
    "double_criterion_sum",
    "doubling_tripling_variance",
    "joint_criterion_sum",
    "spectral_measure",
    "QuadraticSurd",
    "parse_surd",
]
