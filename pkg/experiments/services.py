from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from django.db import transaction

from representations.conf import limit
from representations.decompose import (
    WeightMeasure,
    moments_power_sums,
    restrict,
    spin_projection_measure,
    tensor_decompose,
    tensor_power_measure,
)
from representations.ncmoments import LieElement, tensor_power_trace_moment, wick_limit_moment
from representations.weights import HighestWeight, weyl_vector

from . import rmt
from .compare import (
    DEFAULT_MOMENTS,
    KIND_AT_LEAST,
    EmpiricalSpectrum,
    MomentReport,
    MomentRow,
    Tolerances,
    compare_report,
    fit_gue_parameters,
    orbit_sum_reference,
    power_sums_empirical,
    wasserstein1_uniform,
)
from .models import ExperimentRun, ReportRow

logger = logging.getLogger(__name__)

RESTRICT_LIMIT = "restrict_limit"
TENSOR_LIMIT = "tensor_limit"
CLT = "clt"
SO3_DEMO = "so3_demo"
STOCHASTIC_SUBCOMMANDS = (RESTRICT_LIMIT, TENSOR_LIMIT, CLT, SO3_DEMO)

DEFAULT_SAMPLES = 100_000
DEFAULT_CLT_NS = (16, 64, 256)
DEFAULT_CLT_KS = (2, 3, 4, 5, 6)
DEFAULT_SPINS = (Fraction(1, 2), Fraction(1), Fraction(10), Fraction(50), Fraction(200))
CLT_FIT_CAP = 64
RESTRICT_W1 = 0.02
SO3_W1 = 0.01
ROUNDOFF = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a stochastic run depends on; (config, seed) reproduces the output bit for bit."""

    subcommand: str
    seed: Optional[int] = None
    samples: int = DEFAULT_SAMPLES
    d: Optional[int] = None
    lam: Optional[HighestWeight] = None
    mu: Optional[HighestWeight] = None
    scales: Tuple[int, ...] = (1,)
    n_list: Tuple[int, ...] = DEFAULT_CLT_NS
    k_list: Tuple[int, ...] = DEFAULT_CLT_KS
    radius: float = 1.0
    spins: Tuple[Fraction, ...] = DEFAULT_SPINS
    moments: Tuple[Tuple[int, ...], ...] = DEFAULT_MOMENTS
    abs_tol: Optional[float] = None
    rel_tol: Optional[float] = None
    w1_tol: Optional[float] = None

    def validate(self) -> "ExperimentConfig":
        if self.subcommand not in STOCHASTIC_SUBCOMMANDS:
            raise ValidationError(f"Unknown experiment {self.subcommand!r}.", code="invalid_range")
        if self.seed is None:
            raise ValidationError(f"{self.subcommand} is stochastic and needs --seed.", code="missing_seed")
        rmt.RngStream(self.seed)
        if not 2 <= self.samples <= limit("MAX_SAMPLES"):
            raise ValidationError(
                f"Sample count must be in [2, {limit('MAX_SAMPLES')}], got {self.samples}.", code="too_few_samples"
            )
        for name in ("abs_tol", "rel_tol", "w1_tol"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be a finite non-negative number, got {value}.", code="invalid_range")
        if self.d is not None and not 1 <= self.d <= limit("MAX_RANK"):
            raise ValidationError(f"Rank must be in [1, {limit('MAX_RANK')}], got {self.d}.", code="rank_too_small")
        getattr(self, f"_validate_{self.subcommand}")()
        return self

    def _validate_weight(self, weight: HighestWeight) -> None:
        if weight.d > limit("MAX_RANK"):
            raise ValidationError(f"Rank of {weight} exceeds {limit('MAX_RANK')}.", code="invalid_range")

    def _validate_scales(self) -> None:
        if not self.scales:
            raise ValidationError("Need at least one scale L.", code="invalid_range")
        for scale in self.scales:
            if not 1 <= scale <= limit("MAX_SCALE"):
                raise ValidationError(f"Scale L must be in [1, {limit('MAX_SCALE')}], got {scale}.", code="invalid_range")

    def _validate_restrict_limit(self) -> None:
        self._validate_scales()
        if self.lam is None or self.d is None:
            raise ValidationError("restrict_limit needs a weight and a target rank.", code="invalid_range")
        self._validate_weight(self.lam)
        if not self.d < self.lam.d:
            raise ValidationError(f"Restriction needs d < d' = {self.lam.d}, got d={self.d}.", code="invalid_range")

    def _validate_tensor_limit(self) -> None:
        self._validate_scales()
        if self.lam is None or self.mu is None:
            raise ValidationError("tensor_limit needs two weights.", code="invalid_range")
        self._validate_weight(self.lam)
        if self.lam.d != self.mu.d or (self.d is not None and self.d != self.lam.d):
            raise ValidationError(
                f"Rank mismatch: {self.lam} and {self.mu} with d={self.d}.", code="rank_mismatch"
            )

    def _validate_clt(self) -> None:
        if self.d is None or self.d < 2:
            raise ValidationError("The central limit experiment needs d >= 2.", code="rank_too_small")
        if not self.n_list or min(self.n_list) < 1:
            raise ValidationError(f"Tensor powers must be positive, got {self.n_list}.", code="invalid_range")
        if not self.k_list or min(self.k_list) < 1:
            raise ValidationError(f"Moment orders must be positive, got {self.k_list}.", code="invalid_range")
        cap = limit("MAX_MOMENT_ORDER")
        if max(self.k_list) > cap:
            raise ValidationError(f"Moment order {max(self.k_list)} exceeds the cap {cap}.", code="moment_order_cap")

    def _validate_so3_demo(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError(f"|J| must be positive, got {self.radius}.", code="invalid_range")
        for spin in self.spins:
            if spin <= 0 or (2 * spin).denominator != 1:
                raise ValidationError(f"Spin must be a positive half-integer, got {spin}.", code="invalid_range")

    def tolerances(self, abs_tol: float, rel_tol: float, w1: Optional[float]) -> Tolerances:
        return Tolerances(
            abs_tol=abs_tol if self.abs_tol is None else self.abs_tol,
            rel_tol=rel_tol if self.rel_tol is None else self.rel_tol,
            w1=w1 if self.w1_tol is None else self.w1_tol,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "seed": self.seed,
            "samples": self.samples,
            "d": self.d,
            "lam": list(self.lam.parts) if self.lam else None,
            "mu": list(self.mu.parts) if self.mu else None,
            "scales": list(self.scales),
            "n_list": list(self.n_list),
            "k_list": list(self.k_list),
            "radius": self.radius,
            "spins": [str(spin) for spin in self.spins],
            "moments": [list(ks) for ks in self.moments],
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "w1_tol": self.w1_tol,
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    report: MomentReport
    samples: pd.DataFrame
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.report.passed


def _sample(config: ExperimentConfig, draw: Callable[[rmt.RngStream, int], np.ndarray]) -> np.ndarray:
    return rmt.sample_in_replicas(config.seed, config.samples, draw)


def _spectrum(config: ExperimentConfig, values: np.ndarray, description: str) -> EmpiricalSpectrum:
    return EmpiricalSpectrum(
        d=values.shape[1],
        samples=values,
        metadata={"seed": config.seed, "model": description},
    )


def _prefixed(rows: Sequence[MomentRow], prefix: str) -> List[MomentRow]:
    return [replace(row, label=f"{prefix} {row.label}") for row in rows]


def _uniform_rows(
    label: str, values: np.ndarray, weights: Optional[np.ndarray], low: float, high: float, tolerance: float
) -> MomentRow:
    distance = wasserstein1_uniform(values, weights, low, high)
    return MomentRow(label=label, reference=0.0, estimate=distance, tolerance=tolerance)


def run_restrict_limit(config: ExperimentConfig) -> ExperimentResult:
    """Rescaled restriction of L * lambda_0 to U(d) against eigenvalues of the d x d corner."""
    config.validate()
    lam, d = config.lam, config.d
    model = rmt.InvariantMatrixModel.with_eigenvalues(lam.parts)

    def draw(rng: rmt.RngStream, count: int) -> np.ndarray:
        matrices = rmt.sample_invariant_batch(model, count, rng)
        return rmt.eigh_jacobi_batch(matrices[:, :d, :d])[0]

    logger.info("Restriction experiment %s -> U(%s), scales %s", lam, d, config.scales)
    spectra = _spectrum(config, _sample(config, draw), f"{d}x{d} corner of {model.description}")
    report = MomentReport(metadata={"samples": len(spectra), **spectra.metadata, "config": config.to_dict()})
    corner_law = d == 1 and lam.d == 2 and lam.parts[0] > lam.parts[1]
    low, high = (float(lam.parts[1]), float(lam.parts[0])) if corner_law else (0.0, 0.0)

    for scale in config.scales:
        tolerances = config.tolerances(1 / scale, 1 / scale, RESTRICT_W1)
        exact = restrict(lam.scale(scale), d)
        eps = Fraction(1, scale)
        report.extend(_prefixed(compare_report(exact, eps, spectra, config.moments, tolerances).rows, f"L={scale}"))
        if corner_law:
            points, probabilities = exact.scaled_atoms(eps)
            report.rows.append(
                _uniform_rows(
                    f"L={scale} W1 exact vs Uniform[{low:g},{high:g}]",
                    points[:, 0], probabilities, low, high, tolerances.w1,
                )
            )
    if corner_law:
        report.rows.append(
            _uniform_rows(
                f"W1 corner vs Uniform[{low:g},{high:g}]",
                spectra.samples[:, 0], None, low, high, config.tolerances(0, 0, RESTRICT_W1).w1,
            )
        )
    logger.info("Restriction experiment finished, passed=%s", report.passed)
    return ExperimentResult(config=config, report=report, samples=spectra.to_frame())


def run_tensor_limit(config: ExperimentConfig) -> ExperimentResult:
    """
    Rescaled random highest weight of rho_{L lambda_0} x rho_{L mu_0} against
    the spectrum of A + B for independent orbits of diag(lambda_0), diag(mu_0).
    For d = 2 both sides are also checked against the single-angle
    quadrature: the sampled moments within 0.5/L plus 3 standard errors, the
    exact moments as diagnostics whose error must not grow with L.
    """
    config.validate()
    lam, mu = config.lam, config.mu
    model_a = rmt.InvariantMatrixModel.with_eigenvalues(lam.parts)
    model_b = rmt.InvariantMatrixModel.with_eigenvalues(mu.parts)

    def draw(rng: rmt.RngStream, count: int) -> np.ndarray:
        return rmt.eigh_jacobi_batch(rmt.sum_independent_batch(model_a, model_b, count, rng))[0]

    logger.info("Tensor experiment %s x %s, scales %s", lam, mu, config.scales)
    spectra = _spectrum(config, _sample(config, draw), f"{model_a.description} + {model_b.description}")
    report = MomentReport(metadata={"samples": len(spectra), **spectra.metadata, "config": config.to_dict()})
    oracle = lam.d == 2
    oracle_errors: Dict[Tuple[int, ...], List[Tuple[int, float]]] = {tuple(ks): [] for ks in config.moments}
    references = {tuple(ks): orbit_sum_reference(lam.parts, mu.parts, tuple(ks)) for ks in config.moments} if oracle else {}
    sampled = {ks: power_sums_empirical(spectra, ks) for ks in references}

    for scale in config.scales:
        tolerances = config.tolerances(1 / scale, 1 / scale, 0.02 + 1 / scale)
        try:
            multiplicities = tensor_decompose(lam.scale(scale), mu.scale(scale))
        except ValidationError as exc:
            if exc.code != "state_cap_exceeded":
                raise
            raise ValidationError(
                f"Exact decomposition at L={scale} exceeds the state cap; use a smaller L. {' '.join(exc.messages)}",
                code="state_cap_exceeded",
            ) from exc
        exact = WeightMeasure.from_multiplicities(multiplicities)
        eps = Fraction(1, scale)
        report.extend(_prefixed(compare_report(exact, eps, spectra, config.moments, tolerances).rows, f"L={scale}"))
        for ks, reference in references.items():
            name = f"E[p{'*p'.join(map(str, ks))}]"
            value = float(moments_power_sums(exact, ks, eps))
            oracle_errors[ks].append((scale, abs(value - reference)))
            report.rows.append(
                MomentRow(
                    label=f"L={scale} exact {name} vs orbit quadrature",
                    ks=ks,
                    reference=reference,
                    estimate=value,
                    tolerance=math.inf,
                )
            )
            mean, standard_error = sampled[ks]
            report.rows.append(
                MomentRow(
                    label=f"L={scale} sampled {name} vs orbit quadrature",
                    ks=ks,
                    reference=reference,
                    estimate=mean,
                    standard_error=standard_error,
                    tolerance=config.tolerances(0.5 / scale, 0.0, None).for_reference(reference),
                )
            )

    for ks, errors in oracle_errors.items():
        errors.sort()
        for (small, error_small), (large, error_large) in zip(errors, errors[1:]):
            report.rows.append(
                MomentRow(
                    label=f"quadrature error of p{'*p'.join(map(str, ks))} at L={small} >= at L={large}",
                    ks=ks,
                    reference=0.0,
                    estimate=error_small - error_large,
                    tolerance=ROUNDOFF,
                    kind=KIND_AT_LEAST,
                )
            )
    logger.info("Tensor experiment finished, passed=%s", report.passed)
    return ExperimentResult(config=config, report=report, samples=spectra.to_frame())


def clt_generators(d: int) -> Dict[str, LieElement]:
    """Pauli matrices on the first two coordinates of C^d."""
    x = np.zeros((d, d), dtype=complex)
    y = np.zeros((d, d), dtype=complex)
    z = np.zeros((d, d), dtype=complex)
    x[0, 0], x[1, 1] = 1, -1
    y[0, 1], y[1, 0] = 1, 1
    z[0, 1], z[1, 0] = -1j, 1j
    return {"x": LieElement(x), "y": LieElement(y), "z": LieElement(z)}


def clt_words(k_list: Sequence[int]) -> List[str]:
    words = []
    for k in k_list:
        words.append("x" * k)
        if k >= 3:
            words.append("xyz" + "x" * (k - 3))
    return words


def _fit_rate(ns: Sequence[int], errors: Sequence[float], power: float) -> float:
    """Least-squares C in error ~ C * n^-power."""
    numerator = math.fsum(error * n**-power for n, error in zip(ns, errors))
    denominator = math.fsum(n ** (-2 * power) for n in ns)
    return numerator / denominator


def _clt_exact_rows(config: ExperimentConfig, generators: Dict[str, LieElement]) -> Tuple[List[MomentRow], Dict[str, float]]:
    rows: List[MomentRow] = []
    constants: Dict[str, float] = {}
    ns = sorted(set(config.n_list))
    for word in clt_words(config.k_list):
        xs = [generators[letter] for letter in word]
        k = len(word)
        wick = wick_limit_moment(xs)
        exact = {n: tensor_power_trace_moment(xs, n, centered=True, eps=1 / math.sqrt(n)) for n in ns}
        errors = [abs(exact[n] - wick) for n in ns]
        power = 1.0 if k % 2 == 0 else 0.5
        constant = 0.0 if k == 2 else _fit_rate(ns, errors, power)
        constants[word] = constant
        for n in ns:
            floor = ROUNDOFF * (1 + abs(wick))
            rows.append(
                MomentRow(
                    label=f"n={n} tr[{word}] vs Wick",
                    reference=wick.real,
                    reference_imag=wick.imag,
                    estimate=exact[n].real,
                    estimate_imag=exact[n].imag,
                    tolerance=max(2 * constant * n**-power, floor),
                )
            )
        if k % 2 == 0:
            continue
        for n in ns:
            if 4 * n not in exact:
                continue
            if abs(exact[n]) <= ROUNDOFF and abs(exact[4 * n]) <= ROUNDOFF:
                logger.debug("Odd word %s vanishes identically at n=%s", word, n)
                continue
            ratio = abs(exact[n]) / max(abs(exact[4 * n]), ROUNDOFF)
            rows.append(
                MomentRow(
                    label=f"|tr[{word}]| ratio n={n} / n={4 * n}",
                    reference=1.9,
                    estimate=ratio,
                    kind=KIND_AT_LEAST,
                )
            )
    return rows, constants


def run_clt(config: ExperimentConfig) -> ExperimentResult:
    """
    Centered, 1/sqrt(n)-rescaled tensor powers of the defining representation:
    exact moments against Wick, then Monte Carlo samples of the fitted
    scale * GUE_v against both the exact weight side and the Wick moments.
    """
    config.validate()
    d = config.d
    generators = clt_generators(d)
    exact_rows, constants = _clt_exact_rows(config, generators)
    logger.info("CLT exact moments done for %s words", len(constants))

    fit_n = min(max(config.n_list), CLT_FIT_CAP)
    measure = tensor_power_measure(HighestWeight.defining(d), fit_n)
    eps = 1 / math.sqrt(fit_n)
    # lambda + rho, not lambda, is Gaussian up to O(1/n).
    center = [math.sqrt(fit_n) / d - float(shift) * eps for shift in weyl_vector(d)]
    scale, v = fit_gue_parameters(measure, eps, center)
    logger.info("Fitted scale=%s v=%s at n=%s", scale, v, fit_n)

    def draw(rng: rmt.RngStream, count: int) -> np.ndarray:
        return scale * rmt.sample_gue_v_batch(d, v, count, rng)

    matrices = _sample(config, draw)
    spectra = EmpiricalSpectrum.from_matrices(
        matrices, metadata={"seed": config.seed, "model": f"{scale:.17g} * GUE_v(d={d}, v={v:.17g})"}
    )
    tolerance = 1 / math.sqrt(fit_n)
    tolerances = config.tolerances(tolerance, tolerance, None)
    weight_rows = _prefixed(compare_report(measure, eps, spectra, config.moments, tolerances, center).rows, f"n={fit_n}")

    linear = {letter: np.einsum("sij,ji->s", matrices, generator.centered().H).real for letter, generator in generators.items()}
    wick_rows = []
    for word in clt_words(config.k_list):
        product = np.ones(len(spectra))
        for letter in word:
            product = product * linear[letter]
        reference = wick_limit_moment([generators[letter] for letter in word]).real
        statistic = EmpiricalSpectrum(d=1, samples=product)
        estimate, standard_error = power_sums_empirical(statistic, (1,))
        wick_rows.append(
            MomentRow(
                label=f"E[{'*'.join(f'Tr(X {letter})' for letter in word)}] vs Wick",
                reference=reference,
                estimate=estimate,
                standard_error=standard_error,
                tolerance=tolerances.for_reference(reference),
            )
        )

    report = MomentReport(
        metadata={
            "samples": len(spectra),
            **spectra.metadata,
            "config": config.to_dict(),
            "fitted_rate_constants": constants,
            "gue_fit": {"n": fit_n, "scale": scale, "v": v},
        }
    )
    report.extend(exact_rows).extend(weight_rows).extend(wick_rows)
    logger.info("CLT experiment finished, passed=%s", report.passed)
    return ExperimentResult(config=config, report=report, samples=spectra.to_frame(), metadata=report.metadata)


def run_so3_demo(config: ExperimentConfig) -> ExperimentResult:
    """J_z of a uniformly rotated angular momentum of length |J|, and the spin-j weight laws."""
    config.validate()
    radius = config.radius

    def draw(rng: rmt.RngStream, count: int) -> np.ndarray:
        return rmt.angular_momentum_components(rmt.antisymmetric_orbit_batch(radius, count, rng))[:, 2]

    jz = _sample(config, draw)
    report = MomentReport(metadata={"samples": len(jz), "seed": config.seed, "config": config.to_dict()})
    tolerance = config.tolerances(0, 0, SO3_W1 * radius).w1
    report.rows.append(_uniform_rows(f"W1 J_z vs Uniform[-{radius:g},{radius:g}]", jz, None, -radius, radius, tolerance))

    for spin in config.spins:
        two_j = int(2 * spin)
        law = spin_projection_measure(two_j)
        points = two_j + 1
        spread = max(abs(probability - Fraction(1, points)) for probability in law.values())
        report.rows.append(
            MomentRow(
                label=f"j={spin} law uniform on {points} points",
                reference=0.0,
                estimate=float(spread) + abs(len(law) - points),
                reference_exact=str(Fraction(1, points)),
            )
        )
        values = np.array([radius * key / two_j for key in law], dtype=float)
        weights = np.array([float(probability) for probability in law.values()], dtype=float)
        report.rows.append(
            _uniform_rows(
                f"j={spin} W1 rescaled law vs Uniform[-{radius:g},{radius:g}]",
                values, weights, -radius, radius, radius / points + ROUNDOFF,
            )
        )
    logger.info("SO(3) demo finished, passed=%s", report.passed)
    return ExperimentResult(config=config, report=report, samples=pd.DataFrame({"J_z": jz}))


RUNNERS: Dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    RESTRICT_LIMIT: run_restrict_limit,
    TENSOR_LIMIT: run_tensor_limit,
    CLT: run_clt,
    SO3_DEMO: run_so3_demo,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    try:
        runner = RUNNERS[config.subcommand]
    except KeyError:
        raise ValidationError(f"Unknown experiment {config.subcommand!r}.", code="invalid_range") from None
    return runner(config)


@transaction.atomic
def record_run(result: ExperimentResult, *, build: str = "") -> ExperimentRun:
    run = ExperimentRun(
        subcommand=result.config.subcommand,
        seed=str(result.config.seed),
        config=result.config.to_dict(),
        rng_algorithm=limit("RNG_ALGORITHM"),
        schema_version=limit("REPORT_SCHEMA_VERSION"),
        build=build[:64],
        status=ExperimentRun.STATUS_PASSED if result.passed else ExperimentRun.STATUS_FAILED,
    )
    run.save()
    for position, row in enumerate(result.report.rows):
        ReportRow(
            run=run,
            position=position,
            label=row.label[:128],
            ks=list(row.ks),
            reference=row.reference,
            estimate=row.estimate,
            reference_imag=row.reference_imag,
            estimate_imag=row.estimate_imag,
            error=row.error,
            standard_error=row.standard_error,
            tolerance=row.tolerance if math.isfinite(row.tolerance) else None,
            passed=row.passed,
        ).save()
    logger.info("Recorded run %s with %s rows", run.pk, len(result.report.rows))
    return run
