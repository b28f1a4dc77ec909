from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from numpy.polynomial.legendre import leggauss
from scipy.stats import wasserstein_distance

from representations.decompose import Scalar, WeightMeasure, moments_power_sums

from .rmt import eigh_jacobi_batch

KIND_MATCH = "match"
KIND_AT_LEAST = "at_least"

DEFAULT_MOMENTS: Tuple[Tuple[int, ...], ...] = ((1,), (2,), (3,), (4,), (1, 1), (2, 1))


@dataclass(frozen=True)
class EmpiricalSpectrum:
    """Sampled spectra, one sorted (non-increasing) eigenvalue vector per row."""

    d: int
    samples: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[1] != self.d:
            raise ValidationError(f"Samples of shape {samples.shape} do not have {self.d} columns.", code="rank_mismatch")
        if samples.size and np.any(np.diff(samples, axis=1) > 0):
            raise ValidationError("Every spectrum must be sorted non-increasing.", code="not_dominant")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_matrices(cls, matrices: np.ndarray, metadata: Optional[Dict[str, Any]] = None) -> "EmpiricalSpectrum":
        values, _ = eigh_jacobi_batch(matrices)
        return cls(d=values.shape[1], samples=values, metadata=dict(metadata or {}))

    def __len__(self) -> int:
        return self.samples.shape[0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.samples, columns=[f"eig_{i}" for i in range(1, self.d + 1)])


@dataclass(frozen=True)
class ScaledMeasure:
    """An exact weight measure seen through lambda -> eps * lambda - center."""

    measure: WeightMeasure
    eps: Scalar = 1
    center: Optional[Sequence[Scalar]] = None

    @property
    def d(self) -> int:
        return self.measure.d


def _ks_label(ks: Sequence[int]) -> str:
    return "p" + "*p".join(str(k) for k in ks) if ks else "1"


def power_sums_empirical(s: EmpiricalSpectrum, ks: Sequence[int]) -> Tuple[float, float]:
    """Sample mean and standard error of prod_j p_{k_j} over the sampled spectra."""
    count = len(s)
    if count < 2:
        raise ValidationError(f"Need at least 2 samples, got {count}.", code="too_few_samples")
    values = np.ones(count)
    for k in ks:
        values = values * np.sum(s.samples**k, axis=1)
    mean = math.fsum(values) / count
    variance = math.fsum((values - mean) ** 2) / (count - 1)
    return mean, math.sqrt(variance / count)


def _marginals(x: Union[EmpiricalSpectrum, ScaledMeasure]) -> List[Tuple[np.ndarray, Optional[np.ndarray]]]:
    if isinstance(x, EmpiricalSpectrum):
        return [(x.samples[:, i], None) for i in range(x.d)]
    points, probabilities = x.measure.scaled_atoms(x.eps, x.center)
    return [(points[:, i], probabilities) for i in range(x.d)]


def wasserstein1_sorted(a: Union[EmpiricalSpectrum, ScaledMeasure], b: Union[EmpiricalSpectrum, ScaledMeasure]) -> float:
    """Mean over i of the 1-D W1 distance between the i-th sorted-coordinate marginals."""
    if a.d != b.d:
        raise ValidationError(f"Rank mismatch: {a.d} vs {b.d}.", code="rank_mismatch")
    distances = [
        wasserstein_distance(u_values, v_values, u_weights, v_weights)
        for (u_values, u_weights), (v_values, v_weights) in zip(_marginals(a), _marginals(b))
    ]
    return float(np.mean(distances))


def wasserstein1_uniform(values: np.ndarray, weights: Optional[np.ndarray], low: float, high: float) -> float:
    """
    Exact W1 between a weighted 1-D law and Uniform[low, high], integrating
    |Q(u) - (low + (high - low) u)| over the pieces of the step quantile Q.
    """
    if not high > low:
        raise ValidationError(f"Need low < high, got [{low}, {high}].", code="invalid_range")
    values = np.asarray(values, dtype=float)
    weights = np.full(values.shape, 1.0 / values.size) if weights is None else np.asarray(weights, dtype=float)
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order] / weights.sum()
    upper = np.cumsum(weights)
    upper[-1] = 1.0
    lower = np.concatenate([[0.0], upper[:-1]])
    width = high - low

    def primitive(u):
        return (values - low) * u - width * u**2 / 2

    crossing = np.clip((values - low) / width, lower, upper)
    pieces = (primitive(crossing) - primitive(lower)) - (primitive(upper) - primitive(crossing))
    return float(math.fsum(pieces))


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 0.0
    rel_tol: float = 0.0
    w1: Optional[float] = None

    def for_reference(self, reference: float) -> float:
        return self.abs_tol + self.rel_tol * abs(reference)


@dataclass(frozen=True)
class MomentRow:
    """
    One comparison. Rows of kind "match" pass iff |estimate - reference| <=
    tolerance + 3 standard errors (complex values compared in modulus); rows
    of kind "at_least" pass iff estimate >= reference - tolerance.
    """

    label: str
    reference: float
    estimate: float
    standard_error: float = 0.0
    tolerance: float = 0.0
    ks: Tuple[int, ...] = ()
    reference_imag: float = 0.0
    estimate_imag: float = 0.0
    reference_exact: str = ""
    kind: str = KIND_MATCH

    @property
    def error(self) -> float:
        return math.hypot(self.estimate - self.reference, self.estimate_imag - self.reference_imag)

    @property
    def passed(self) -> bool:
        if self.kind == KIND_AT_LEAST:
            return self.estimate >= self.reference - self.tolerance
        return self.error <= self.tolerance + 3 * self.standard_error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "kind": self.kind,
            "ks": list(self.ks),
            "reference": self.reference,
            "reference_imag": self.reference_imag,
            "reference_exact": self.reference_exact,
            "estimate": self.estimate,
            "estimate_imag": self.estimate_imag,
            "standard_error": self.standard_error,
            "tolerance": self.tolerance if math.isfinite(self.tolerance) else None,
            "error": self.error,
            "passed": self.passed,
        }


@dataclass
class MomentReport:
    rows: List[MomentRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def extend(self, rows: Sequence[MomentRow]) -> "MomentReport":
        self.rows.extend(rows)
        return self

    def failures(self) -> List[MomentRow]:
        return [row for row in self.rows if not row.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "metadata": self.metadata, "rows": [row.to_dict() for row in self.rows]}

    def to_frame(self) -> pd.DataFrame:
        columns = ["label", "reference", "estimate", "standard_error", "tolerance", "error", "passed"]
        return pd.DataFrame([{key: row.to_dict()[key] for key in columns} for row in self.rows], columns=columns)


def _fraction_text(value) -> str:
    numerator = getattr(value, "numerator", None)
    if numerator is not None and not isinstance(value, int):
        return f"{value.numerator}/{value.denominator}"
    return repr(value)


def compare_report(
    exact: WeightMeasure,
    eps: Scalar,
    spectra: EmpiricalSpectrum,
    moment_list: Sequence[Sequence[int]] = DEFAULT_MOMENTS,
    tolerances: Tolerances = Tolerances(),
    center: Optional[Sequence[Scalar]] = None,
) -> MomentReport:
    """Rescaled exact weight moments against empirical eigenvalue moments, plus the W1 diagnostic."""
    if exact.d != spectra.d:
        raise ValidationError(f"Rank mismatch: measure d={exact.d}, spectra d={spectra.d}.", code="rank_mismatch")
    report = MomentReport(metadata={"samples": len(spectra), **spectra.metadata})
    for ks in moment_list:
        ks = tuple(ks)
        reference = moments_power_sums(exact, ks, eps, center)
        estimate, standard_error = power_sums_empirical(spectra, ks)
        report.rows.append(
            MomentRow(
                label=f"E[{_ks_label(ks)}]",
                ks=ks,
                reference=float(reference),
                reference_exact=_fraction_text(reference),
                estimate=estimate,
                standard_error=standard_error,
                tolerance=tolerances.for_reference(float(reference)),
            )
        )
    distance = wasserstein1_sorted(ScaledMeasure(exact, eps, center), spectra)
    report.rows.append(
        MomentRow(
            label="W1 sorted marginals",
            reference=0.0,
            estimate=distance,
            tolerance=math.inf if tolerances.w1 is None else tolerances.w1,
        )
    )
    return report


def fit_gue_parameters(
    measure: WeightMeasure, eps: Scalar, center: Optional[Sequence[Scalar]] = None
) -> Tuple[float, float]:
    """
    (scale, v) such that scale * GUE_v matches the second moments of the
    rescaled centered weight: traceless part through E[p2 - p1^2 / d], trace
    part through E[p1^2].
    """
    d = measure.d
    p2 = float(moments_power_sums(measure, (2,), eps, center))
    p11 = float(moments_power_sums(measure, (1, 1), eps, center))
    if d == 1:
        return 1.0, p11
    scale_squared = max(p2 - p11 / d, 0.0) / (d * d - 1)
    if scale_squared == 0:
        return 0.0, 0.0
    return math.sqrt(scale_squared), p11 / (scale_squared * d * d)


def orbit_sum_reference(lam: Sequence[float], mu: Sequence[float], ks: Sequence[int], nodes: int = 32) -> float:
    """
    E[prod_j p_{k_j}] of the spectrum of A + B for independent d=2 orbits of
    diag(lam) and diag(mu).

    A + B - (lam_2 + mu_2) I = alpha P_u + beta P_v with t = |<u, v>|^2 uniform
    on [0, 1], eigenvalues m +- sqrt(((alpha - beta) / 2)^2 + alpha beta t).
    The power sums are polynomial in t, so Gauss-Legendre is exact.
    """
    if len(lam) != 2 or len(mu) != 2:
        raise ValidationError("The single-angle oracle covers d = 2 only.", code="rank_mismatch")
    lam = sorted((float(value) for value in lam), reverse=True)
    mu = sorted((float(value) for value in mu), reverse=True)
    alpha, beta = lam[0] - lam[1], mu[0] - mu[1]
    shift = lam[1] + mu[1]
    points, weights = leggauss(nodes)
    t = (points + 1) / 2
    middle = (alpha + beta) / 2
    radius = np.sqrt(((alpha - beta) / 2) ** 2 + alpha * beta * t)
    top, bottom = shift + middle + radius, shift + middle - radius
    values = np.ones_like(t)
    for k in ks:
        values = values * (top**k + bottom**k)
    return float(np.sum(weights * values) / 2)
