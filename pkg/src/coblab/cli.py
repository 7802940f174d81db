"""Batch experiment driver: every pipeline behind one reproducible command.

Each subcommand wraps a module pipeline with a serializable configuration,
so identical configs on identical versions produce byte-identical reports.
Structured results go out as JSON, series as CSV, and the human-readable
view as text; every report embeds the config, the tool version, and the
precision policy, and never a timestamp.

Exit codes: 0 success, 2 configuration problem, 3 a search came up short,
4 a mathematically guaranteed inequality failed to certify (a bug).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from . import __version__
from .certify import HARD_CAP_BITS, Enclosure
from .constructions import (
    build_joint_not_double,
    check_bad_joint,
    check_double_bad,
    check_mur_envelope,
    kac_salem_series,
    large_coeff_witness,
    petersen_series,
)
from .diophantine import (
    _decimal_str,
    bad_pair_constant,
    continued_fraction,
    convergents,
    dirichlet_pair_search,
    records_to_csv,
    square_approximation_search,
)
from .errors import (
    CertificationError,
    ConfigError,
    PrecisionCapError,
    ShortfallError,
)
from .fourier import (
    WORK_PREC,
    apply_difference,
    browder_sum_norm,
    mpf_to_fraction,
    random_real_series,
)
from .shift_example import (
    build_h,
    build_q,
    divergence_certificate,
    lp_partial_norm,
    shift_grid_to_csv,
)
from .spectral import (
    cesaro_rate_profile,
    coboundary_integral,
    criterion_to_csv,
    double_criterion_sum,
    doubling_tripling_variance,
    joint_criterion_sum,
    profile_to_csv,
    spectral_measure,
)
from .surd import parse_surd

_SCHEMA = "coblab-report-v1"

_ACTIONS = {
    "approx": ("dirichlet", "bad-pair", "squares", "cf"),
    "construct": (),
    "check": (
        "bad-joint",
        "mur",
        "double-bad",
        "kac-salem",
        "large-coeff",
        "petersen",
    ),
    "spectral": (),
    "rates": (),
    "shift": (),
    "selftest": (),
}

_FORMATS = ("csv", "json", "text")

_DEFAULT_ALPHA = "(-1+1*sqrt(2))/1"
_DEFAULT_BETA = "(-1+1*sqrt(3))/1"

# Fields carried as canonical fraction strings so configs serialize exactly.
_RATIONAL_FIELDS = ("delta", "gamma", "p", "ratio", "budget", "tol")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs, in JSON-friendly primitives.

    Rational-valued knobs are held as canonical fraction strings ("3/5"),
    so a config survives any number of serialization round trips unchanged
    and two equal configs render byte-identical reports.
    """

    subcommand: str
    action: Optional[str] = None
    alpha: str = _DEFAULT_ALPHA
    beta: str = _DEFAULT_BETA
    Q: int = 10000
    K: int = 10
    N: int = 64
    depth: int = 30
    delta: str = "3/5"
    gamma: str = "2"
    p: str = "2"
    ratio: str = "2"
    budget: str = "2"
    tol: str = "1/1000000000000"
    out: Optional[str] = None
    format: str = "text"
    seed: int = 0
    threads: int = 1
    doubling_tripling: bool = False

    def __post_init__(self):
        if self.subcommand not in _ACTIONS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        allowed = _ACTIONS[self.subcommand]
        if allowed:
            if self.action not in allowed:
                raise ConfigError(
                    f"subcommand {self.subcommand!r} needs an action "
                    f"from {allowed}, got {self.action!r}"
                )
        elif self.action is not None:
            raise ConfigError(
                f"subcommand {self.subcommand!r} takes no action"
            )
        if self.format not in _FORMATS:
            raise ConfigError(f"format must be one of {_FORMATS}")
        for name in ("Q", "K", "N", "depth"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"--{name} must be a positive integer")
        if self.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1")
        for name in _RATIONAL_FIELDS:
            raw = getattr(self, name)
            try:
                value = Fraction(str(raw))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"--{name}: not a rational: {raw!r}") from exc
            object.__setattr__(self, name, str(value))
        if not (0 < self.rational("tol") < 1):
            raise ConfigError("--tol must lie strictly between 0 and 1")
        if not (0 < self.rational("delta") < 1):
            raise ConfigError("--delta must lie strictly between 0 and 1")
        if self.rational("gamma") <= 0:
            raise ConfigError("--gamma must be positive")
        if self.rational("p") < 1:
            raise ConfigError("--p must be at least 1")
        if self.rational("ratio") <= 1:
            raise ConfigError("--ratio must exceed 1")
        if self.rational("budget") <= 0:
            raise ConfigError("--budget must be positive")

    def rational(self, name: str) -> Fraction:
        if name not in _RATIONAL_FIELDS:
            raise ConfigError(f"{name} is not a rational-valued field")
        return Fraction(getattr(self, name))

    def to_json_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json_dict(cls, payload: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "subcommand" not in payload:
            raise ConfigError("config needs a subcommand")
        return cls(**payload)


# ---------------------------------------------------------------------------
# report assembly


@dataclass
class _Body:
    """What a handler produces before formatting: data, prose, series."""

    data: dict
    text: list
    csv_write: Optional[Callable] = None


def _precision_policy() -> dict:
    return {
        "working_bits": WORK_PREC,
        "enclosures": "rational intervals with outward dyadic rounding",
        "enclosure_cap_bits": HARD_CAP_BITS,
    }


def _enc(enclosure: Enclosure) -> dict:
    return {
        "lo": _decimal_str(enclosure.lo, "down"),
        "hi": _decimal_str(enclosure.hi, "up"),
    }


def _config_json(config: ExperimentConfig) -> str:
    return json.dumps(config.to_json_dict(), sort_keys=True)


def _header_lines(config: ExperimentConfig) -> list:
    policy = _precision_policy()
    return [
        f"# {_SCHEMA}",
        f"# version: {__version__}",
        f"# precision: {policy['working_bits']}-bit working precision; "
        f"{policy['enclosures']} (cap {policy['enclosure_cap_bits']} bits)",
        f"# seed: {config.seed}",
        f"# config: {_config_json(config)}",
    ]


def _render(config: ExperimentConfig, body: _Body) -> str:
    if config.format == "json":
        envelope = {
            "schema": _SCHEMA,
            "version": __version__,
            "precision": _precision_policy(),
            "seed": config.seed,
            "config": config.to_json_dict(),
            "result": body.data,
        }
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    header = _header_lines(config)
    if config.format == "csv":
        buffer = io.StringIO()
        if body.csv_write is None:
            raise ConfigError(
                "no series output defined for this subcommand; "
                "use --format json or text"
            )
        body.csv_write(buffer)
        return "\n".join(header) + "\n" + buffer.getvalue()
    return "\n".join(header + [""] + [str(line) for line in body.text]) + "\n"


def _emit(config: ExperimentConfig, body: _Body, stream) -> None:
    rendered = _render(config, body)
    if config.out is None:
        stream.write(rendered)
    else:
        try:
            with open(config.out, "w", newline="") as handle:
                handle.write(rendered)
        except OSError as exc:
            raise ConfigError(f"cannot write {config.out!r}: {exc}") from exc


def _parallel_map(fn, items, threads: int):
    """Order-preserving map; threaded only for pure rational pipelines."""
    if threads <= 1:
        return [fn(item) for item in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommand handlers


def _surds(config: ExperimentConfig):
    return (
        parse_surd(config.alpha, label="alpha"),
        parse_surd(config.beta, label="beta"),
    )


def _flagship(config: ExperimentConfig):
    alpha, beta = _surds(config)
    return build_joint_not_double(
        alpha,
        beta,
        config.K,
        config.Q,
        ratio=config.rational("ratio"),
        budget=config.rational("budget"),
    )


def _handle_approx(config: ExperimentConfig) -> _Body:
    alpha, beta = _surds(config)
    if config.action == "dirichlet":
        records = dirichlet_pair_search(
            alpha, beta, config.Q, tol=config.rational("tol")
        )
        data = {
            "count": len(records),
            "records": [
                {
                    "q": r.q,
                    "dist_alpha": _enc(r.dist_alpha),
                    "dist_beta": _enc(r.dist_beta),
                    "quality": _enc(r.quality),
                }
                for r in records
            ],
        }
        text = [f"{len(records)} denominators up to Q = {config.Q}"] + [
            f"q = {r.q}: quality in [{_decimal_str(r.quality.lo, 'down', 8)},"
            f" {_decimal_str(r.quality.hi, 'up', 8)}]"
            for r in records[:25]
        ]
        return _Body(data, text, lambda fh: records_to_csv(records, fh))
    if config.action == "bad-pair":
        constant, argmin = bad_pair_constant(alpha, beta, config.Q)
        data = {"constant": _enc(constant), "argmin": argmin, "Q": config.Q}
        text = [
            f"liminf proxy over q <= {config.Q}: "
            f"[{_decimal_str(constant.lo, 'down', 10)}, "
            f"{_decimal_str(constant.hi, 'up', 10)}] at q = {argmin}"
        ]
        return _Body(data, text)
    if config.action == "squares":
        hits = square_approximation_search(
            beta, config.rational("delta"), config.N
        )
        data = {
            "delta": config.delta,
            "N": config.N,
            "count": len(hits),
            "hits": hits,
        }
        text = [
            f"{len(hits)} squares n**2 <= {config.N} with "
            f"||n**2 * beta|| < n**(-{config.delta})"
        ] + [str(n) for n in hits]

        def write_csv(fh):
            import csv as _csv

            writer = _csv.writer(fh)
            writer.writerow(["n"])
            for n in hits:
                writer.writerow([n])

        return _Body(data, text, write_csv)
    terms = continued_fraction(alpha, config.depth)
    convs = convergents(alpha, config.depth)
    data = {
        "terms": terms,
        "convergents": [[p, q] for p, q in convs],
    }
    text = [f"continued fraction to depth {config.depth}: {terms}"] + [
        f"p/q = {p}/{q}" for p, q in convs
    ]

    def write_csv(fh):
        import csv as _csv

        writer = _csv.writer(fh)
        writer.writerow(["k", "a_k", "p_k", "q_k"])
        for k, (a, (p, q)) in enumerate(zip(terms, convs)):
            writer.writerow([k, a, p, q])

    return _Body(data, text, write_csv)


def _handle_construct(config: ExperimentConfig) -> _Body:
    result = _flagship(config)
    data = result.to_json_dict()
    text = [
        f"denominators: {[r.q for r in result.q_sequence]}",
        f"overall verdict: {'PASS' if result.verdict else 'FAIL'}",
        "",
    ]
    for cert in result.certificates:
        text.append(cert.render())
        text.append("")
    text.extend(result.notes)
    return _Body(data, text, result.f.to_csv)


def _check_inputs(config: ExperimentConfig):
    """Canonical checker input: the flagship series and its magnitudes."""
    result = _flagship(config)
    magnitudes = [
        (n, mpf_to_fraction(mpmath.re(c))) for n, c in result.f.items() if n > 0
    ]
    return result, magnitudes


def _handle_check(config: ExperimentConfig) -> _Body:
    alpha, beta = _surds(config)
    result, magnitudes = _check_inputs(config)
    if config.action == "bad-joint":
        cert = check_bad_joint(result.f, "C")
        extra = check_bad_joint(result.f, "L2")
        data = {
            "C": cert.to_json_dict(),
            "L2": extra.to_json_dict(),
        }
        text = [cert.render(), "", extra.render()]
        certs = [cert, extra]
    elif config.action == "mur":
        # The envelope criterion wants a non-increasing sequence; feed it
        # the decreasing rearrangement of the coefficient magnitudes.
        cert = check_mur_envelope(sorted((m for _, m in magnitudes),
                                         reverse=True))
        data = cert.to_json_dict()
        text = [cert.render()]
        certs = [cert]
    elif config.action == "double-bad":
        # The log-power envelope is undefined at |k| = 1; check the series
        # with its first harmonic removed.
        from .fourier import SparseFourierSeries

        trimmed = SparseFourierSeries(
            {n: c for n, c in result.f.items() if abs(n) >= 2},
            real_valued=result.f.real_valued,
        )
        cert = check_double_bad(trimmed, config.rational("gamma"))
        data = cert.to_json_dict()
        text = [cert.render()]
        certs = [cert]
    elif config.action == "kac-salem":
        partial, tail = kac_salem_series(magnitudes, beta)
        data = {
            "partial": _enc(partial.value),
            "tail": _enc(tail),
            "terms": len(partial.terms),
        }
        text = [
            f"partial sum of |a_k| / sin(pi ||k beta||) over "
            f"{len(partial.terms)} terms: "
            f"[{_decimal_str(partial.value.lo, 'down', 12)}, "
            f"{_decimal_str(partial.value.hi, 'up', 12)}]",
            f"tail allowance: [{_decimal_str(tail.lo, 'down', 12)}, "
            f"{_decimal_str(tail.hi, 'up', 12)}]",
        ]
        certs = []
    elif config.action == "large-coeff":
        cert = large_coeff_witness(
            result.f, beta, config.depth, threshold=config.rational("delta")
        )
        data = cert.to_json_dict()
        text = [cert.render()]
        certs = [cert]
    else:
        partial = petersen_series(result.f, alpha, beta)
        data = {
            "value": _enc(partial.value),
            "terms": [[n, _enc(e)] for n, e in partial.terms],
        }
        text = [
            f"quadratic-divisor series over {len(partial.terms)} atoms: "
            f"[{_decimal_str(partial.value.lo, 'down', 12)}, "
            f"{_decimal_str(partial.value.hi, 'up', 12)}]"
        ]
        certs = []

    def write_csv(fh):
        import csv as _csv

        writer = _csv.writer(fh)
        writer.writerow(
            ["description", "value_lo", "value_hi", "comparison", "satisfied"]
        )
        for cert in certs:
            for entry in cert.entries:
                writer.writerow(
                    [
                        entry.description,
                        _decimal_str(entry.value.lo, "down"),
                        _decimal_str(entry.value.hi, "up"),
                        entry.comparison,
                        entry.satisfied,
                    ]
                )

    return _Body(data, text, write_csv if certs else None)


def _handle_spectral(config: ExperimentConfig) -> _Body:
    alpha, beta = _surds(config)
    result = _flagship(config)
    measure = spectral_measure(result.f, alpha, beta)
    joint = joint_criterion_sum(measure)
    double = double_criterion_sum(measure)
    alpha_side = coboundary_integral(measure, "alpha")
    beta_side = coboundary_integral(measure, "beta")
    data = {
        "atoms": len(measure),
        "total_mass": str(measure.total_mass()),
        "alpha_integral": {
            "value": _enc(alpha_side.value),
            "divergent": alpha_side.divergent,
        },
        "beta_integral": {
            "value": _enc(beta_side.value),
            "divergent": beta_side.divergent,
        },
        "joint_sum": _enc(joint.value),
        "double_sum": _enc(double.value),
    }
    text = [
        f"atomic measure with {len(measure)} atoms, "
        f"total mass {float(measure.total_mass()):.6g}",
        f"alpha-side membership integral: "
        f"[{_decimal_str(alpha_side.value.lo, 'down', 12)}, "
        f"{_decimal_str(alpha_side.value.hi, 'up', 12)}]",
        f"beta-side membership integral: "
        f"[{_decimal_str(beta_side.value.lo, 'down', 12)}, "
        f"{_decimal_str(beta_side.value.hi, 'up', 12)}]",
        f"joint criterion sum: [{_decimal_str(joint.value.lo, 'down', 12)}, "
        f"{_decimal_str(joint.value.hi, 'up', 12)}]",
        f"double criterion sum: [{_decimal_str(double.value.lo, 'down', 12)},"
        f" {_decimal_str(double.value.hi, 'up', 12)}]",
    ]
    return _Body(data, text, lambda fh: criterion_to_csv(double, fh))


def _handle_rates(config: ExperimentConfig) -> _Body:
    if config.doubling_tripling:
        ns = list(range(1, min(config.N, 64) + 1))
        values = _parallel_map(doubling_tripling_variance, ns, config.threads)
        data = {
            "n": ns,
            "normalized_variance": [str(v) for v in values],
        }
        text = [
            "normalized ergodic variance of the doubling/tripling square "
            "average: exactly 1 at every n"
        ] + [f"n = {n}: {v}" for n, v in zip(ns, values)]

        def write_csv(fh):
            import csv as _csv

            writer = _csv.writer(fh)
            writer.writerow(["n", "value_lo", "value_hi"])
            for n, v in zip(ns, values):
                writer.writerow([n, str(v), str(v)])

        return _Body(data, text, write_csv)
    alpha, beta = _surds(config)
    result = _flagship(config)
    n_values = sorted({1 << i for i in range(config.N.bit_length())} | {config.N})
    n_values = [n for n in n_values if n <= config.N]
    profile = cesaro_rate_profile(result.f, alpha, beta, n_values)
    data = {
        "rows": [[n, per_n, per_n_sq] for n, per_n, per_n_sq in profile]
    }
    text = [
        f"n = {n}: |S_n|/n = {per_n:.6e}, |S_n|/n^2 = {per_n_sq:.6e}"
        for n, per_n, per_n_sq in profile
    ]
    return _Body(data, text, lambda fh: profile_to_csv(profile, fh))


def _handle_shift(config: ExperimentConfig) -> _Body:
    p = config.rational("p")
    h = build_h(p)
    box = min(config.K, 2000)
    norm = lp_partial_norm(h, p, box, box)
    report = divergence_certificate(p, config.K)
    data = {
        "p": config.p,
        "K": config.K,
        "lp_norm": {
            "partial": _enc(norm.partial),
            "tail": _enc(norm.tail),
            "total": _enc(norm.total),
            "diagonals": norm.diagonals,
        },
        "row_sum_lower": _enc(report.row_sum_lower),
        "bounded_exponent": report.bounded_exponent,
        "lr_partial": _enc(report.lr_partial),
        "log_threshold": report.log_threshold,
        "certificate": report.certificate.to_json_dict(),
    }
    text = [
        f"l_{config.p} mass of h on the first {norm.diagonals} diagonals: "
        f"[{_decimal_str(norm.total.lo, 'down', 12)}, "
        f"{_decimal_str(norm.total.hi, 'up', 12)}]",
        f"row sum of q**{config.p} over k <= {config.K} is at least "
        f"{_decimal_str(report.row_sum_lower.lo, 'down', 10)}",
        f"whole-lattice q**{report.bounded_exponent} mass stays below "
        f"{_decimal_str(report.lr_partial.hi, 'up', 10)}",
        "",
        report.certificate.render(),
    ]
    edge = min(config.N, 16)

    def write_csv(fh):
        grid = build_q(h, edge, edge, tail_terms=256)
        shift_grid_to_csv(grid, fh)

    return _Body(data, text, write_csv)


def _handle_selftest(config: ExperimentConfig) -> _Body:
    alpha, beta = _surds(config)
    checks = []

    values = _parallel_map(
        doubling_tripling_variance, range(1, 65), config.threads
    )
    checks.append(
        ("doubling/tripling variance exactly 1 for n <= 64",
         all(v == 1 for v in values))
    )

    result = build_joint_not_double(alpha, beta, min(config.K, 6), config.Q)
    checks.append(("flagship construction certificates", result.verdict))

    ergodic_ok = True
    for offset in range(3):
        g = random_real_series(config.seed + offset, 16)
        bound = 2 * g.l2_norm() + 1e-9
        diff = apply_difference(g, alpha)
        worst = max(browder_sum_norm(diff, alpha, n) for n in (1, 7, 50))
        ergodic_ok = ergodic_ok and worst <= bound
    checks.append(("seeded one-sided ergodic sums within 2||g||", ergodic_ok))

    g = random_real_series(config.seed, 8)
    phi = apply_difference(g, alpha)
    measure = spectral_measure(phi, alpha, beta)
    integral = coboundary_integral(measure, "alpha")
    mass = spectral_measure(g, alpha, beta).total_mass()
    checks.append(
        ("spectral change of variables recovers the solution mass",
         integral.value.lo <= mass <= integral.value.hi)
    )

    h = build_h(2)
    grid = build_q(h, 2, 2, tail_terms=128)
    second = grid.diagonals[2] - 2 * grid.diagonals[3] + grid.diagonals[4]
    f_enc = h.diagonal_value(2) - h.diagonal_value(3)
    checks.append(
        ("lattice second difference reproduces (I-U)h",
         max(second.lo, f_enc.lo) <= min(second.hi, f_enc.hi))
    )

    failed = [name for name, ok in checks if not ok]
    data = {
        "checks": [{"name": name, "ok": ok} for name, ok in checks],
        "passed": len(checks) - len(failed),
        "failed": len(failed),
    }
    text = [
        f"{'ok' if ok else 'FAIL'} - {name}" for name, ok in checks
    ] + [f"{len(checks) - len(failed)}/{len(checks)} checks passed"]
    if failed:
        raise CertificationError(
            "selftest failures: " + "; ".join(failed)
        )
    return _Body(data, text)


_HANDLERS = {
    "approx": _handle_approx,
    "construct": _handle_construct,
    "check": _handle_check,
    "spectral": _handle_spectral,
    "rates": _handle_rates,
    "shift": _handle_shift,
    "selftest": _handle_selftest,
}


# ---------------------------------------------------------------------------
# entry points


def run(config: ExperimentConfig, stream=None) -> int:
    """Execute one configured experiment and write its report.

    Returns the process exit code instead of raising, so the command-line
    wrapper and programmatic callers share one error policy.
    """
    stream = stream if stream is not None else sys.stdout
    try:
        body = _HANDLERS[config.subcommand](config)
        _emit(config, body, stream)
        return 0
    except ConfigError as exc:
        _error_report("config", exc)
        return 2
    except ShortfallError as exc:
        _error_report("shortfall", exc)
        return 3
    except (CertificationError, PrecisionCapError) as exc:
        _error_report("certification", exc)
        return 4


def _error_report(kind: str, exc: Exception) -> None:
    payload = {
        "schema": _SCHEMA,
        "version": __version__,
        "error": {"kind": kind, "type": type(exc).__name__,
                  "message": str(exc)},
    }
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--alpha", default=_DEFAULT_ALPHA,
                        help="first rotation number, (a+b*sqrt(d))/c")
    shared.add_argument("--beta", default=_DEFAULT_BETA,
                        help="second rotation number, (a+b*sqrt(d))/c")
    shared.add_argument("--Q", type=int, default=10000,
                        help="denominator search bound")
    shared.add_argument("--K", type=int, default=10,
                        help="number of construction terms / lattice columns")
    shared.add_argument("--N", type=int, default=64,
                        help="range bound for searches, rates, and grids")
    shared.add_argument("--depth", type=int, default=30,
                        help="continued-fraction / witness search depth")
    shared.add_argument("--delta", default="3/5",
                        help="exponent or threshold in (0, 1)")
    shared.add_argument("--gamma", default="2",
                        help="logarithmic decay exponent")
    shared.add_argument("--p", default="2",
                        help="lattice space exponent, at least 1")
    shared.add_argument("--ratio", default="2",
                        help="lacunarity ratio, above 1")
    shared.add_argument("--budget", default="2",
                        help="summability budget for term selection")
    shared.add_argument("--tol", default="1/1000000000000",
                        help="numeric tolerance in (0, 1)")
    shared.add_argument("--out", default=None, help="report file path")
    shared.add_argument("--format", choices=_FORMATS, default="text")
    shared.add_argument("--seed", type=int, default=0,
                        help="seed for randomized property checks")
    shared.add_argument("--threads", type=int, default=1,
                        help="workers for pure rational sweeps")

    parser = argparse.ArgumentParser(
        prog="coblab",
        description=(
            "Certified constructions, searches, and diagnostics for joint "
            "and double coboundaries of commuting circle rotations."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    approx = sub.add_parser(
        "approx", parents=[shared],
        help="Diophantine searches: simultaneous denominators, pair "
             "constants, square powers, continued fractions",
    )
    approx.add_argument("action", choices=_ACTIONS["approx"])
    sub.add_parser("construct", parents=[shared],
                   help="build the certified joint-not-double series")
    check = sub.add_parser(
        "check", parents=[shared],
        help="summability, envelope, and witness checkers on the "
             "constructed series",
    )
    check.add_argument("action", choices=_ACTIONS["check"])
    sub.add_parser("spectral", parents=[shared],
                   help="atomic spectral measure and membership integrals")
    rates = sub.add_parser("rates", parents=[shared],
                           help="ergodic averaging rate profiles")
    rates.add_argument(
        "--doubling-tripling", dest="doubling_tripling", action="store_true",
        help="emit the exact unit-variance table for the commuting "
             "endomorphism square average",
    )
    sub.add_parser("shift", parents=[shared],
                   help="lattice shift example: norms, the formal solution, "
                        "and its divergence certificate")
    sub.add_parser("selftest", parents=[shared],
                   help="run the deterministic property suite")
    return parser


def config_from_namespace(ns: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        subcommand=ns.subcommand,
        action=getattr(ns, "action", None),
        alpha=ns.alpha,
        beta=ns.beta,
        Q=ns.Q,
        K=ns.K,
        N=ns.N,
        depth=ns.depth,
        delta=ns.delta,
        gamma=ns.gamma,
        p=ns.p,
        ratio=ns.ratio,
        budget=ns.budget,
        tol=ns.tol,
        out=ns.out,
        format=ns.format,
        seed=ns.seed,
        threads=ns.threads,
        doubling_tripling=getattr(ns, "doubling_tripling", False),
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config = config_from_namespace(ns)
    except ConfigError as exc:
        _error_report("config", exc)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
