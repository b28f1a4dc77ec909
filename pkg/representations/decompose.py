from __future__ import annotations

import itertools
import logging
import numbers
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from django.core.exceptions import ValidationError

from .conf import limit
from .weights import HighestWeight, common_rank, dim_weyl

logger = logging.getLogger(__name__)

MultiplicityMap = Dict[HighestWeight, int]
Scalar = Union[int, float, Fraction]


class MeasureEntry(NamedTuple):
    multiplicity: int
    probability: Fraction


@dataclass(frozen=True)
class WeightMeasure:
    """
    Dimension-weighted law of the random highest weight of a representation:
    each irreducible component lambda carries n_lambda * dim(lambda) / dim(V).
    """

    d: int
    entries: Mapping[HighestWeight, MeasureEntry]
    total_dim: int

    @classmethod
    def from_multiplicities(cls, multiplicities: Mapping[HighestWeight, int]) -> "WeightMeasure":
        if not multiplicities:
            raise ValidationError("A representation needs at least one component.", code="empty_representation")
        d = common_rank(multiplicities.keys())
        for weight, multiplicity in multiplicities.items():
            if multiplicity < 1:
                raise ValidationError(f"Multiplicity of {weight} must be >= 1.", code="empty_representation")
        dims = {weight: dim_weyl(weight) for weight in multiplicities}
        total_dim = sum(multiplicity * dims[weight] for weight, multiplicity in multiplicities.items())
        entries = {
            weight: MeasureEntry(multiplicity, Fraction(multiplicity * dims[weight], total_dim))
            for weight, multiplicity in sorted(multiplicities.items(), reverse=True)
        }
        return cls(d=d, entries=entries, total_dim=total_dim)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def multiplicity(self, weight: HighestWeight) -> int:
        entry = self.entries.get(weight)
        return entry.multiplicity if entry else 0

    def probability(self, weight: HighestWeight) -> Fraction:
        entry = self.entries.get(weight)
        return entry.probability if entry else Fraction(0)

    def multiplicities(self) -> MultiplicityMap:
        return {weight: entry.multiplicity for weight, entry in self.entries.items()}

    def mean_vector(self, eps: Scalar = 1) -> Tuple[Fraction, ...]:
        mean = [Fraction(0)] * self.d
        for weight, entry in self.entries.items():
            for i, value in enumerate(weight.parts):
                mean[i] += entry.probability * value
        return tuple(eps * value for value in mean)

    def scaled_atoms(self, eps: Scalar = 1, center: Optional[Sequence[Scalar]] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Atoms eps * lambda - center as a float array (one row per weight) and their probabilities."""
        weights = list(self.entries)
        points = float(eps) * np.array([weight.parts for weight in weights], dtype=float)
        if center is not None:
            points = points - np.array([float(value) for value in center], dtype=float)
        probabilities = np.array([float(self.entries[weight].probability) for weight in weights], dtype=float)
        return points, probabilities

    def to_rows(self) -> List[dict]:
        return [
            {
                "weight": weight.label(),
                "multiplicity": str(entry.multiplicity),
                "dim": str(dim_weyl(weight)),
                "probability": f"{entry.probability.numerator}/{entry.probability.denominator}",
            }
            for weight, entry in self.entries.items()
        ]


def _require_same_rank(a: HighestWeight, b: HighestWeight) -> None:
    if a.d != b.d:
        raise ValidationError(f"Rank mismatch: {a} has d={a.d}, {b} has d={b.d}.", code="rank_mismatch")


def _lr_partitions(a: Tuple[int, ...], b: Tuple[int, ...], cap: int) -> Counter:
    """
    Littlewood-Richardson coefficients for partitions a, b with at most d rows.
    Raises state_cap_exceeded once more than cap fillings have been found.

    A filling of nu/a with content b is encoded by t[i][j], the number of
    letters j in row i. Rows are weakly increasing by construction; the bounds
    below enforce column strictness and the lattice condition on the reverse
    reading word.
    """
    d = len(a)
    content = [value for value in b if value > 0]
    letters = len(content)
    used = [0] * letters
    nu = list(a)
    result: Counter = Counter()
    fillings = [0]

    def fill_row(i: int, above: List[int]) -> None:
        if i == d:
            if used == content:
                result[tuple(nu)] += 1
                fillings[0] += 1
                if fillings[0] > cap:
                    raise ValidationError(
                        f"Littlewood-Richardson enumeration exceeds the state cap ({cap} fillings, "
                        f"{len(result)} weights so far); use smaller weights or raise STATE_CAP.",
                        code="state_cap_exceeded",
                    )
            return
        before = list(used)
        top = min(i, letters - 1)

        def fill_letter(j: int, prefix: int, prefixes: List[int]) -> None:
            if j > top:
                nu[i] = a[i] + prefix
                fill_row(i + 1, prefixes + [prefix] * (letters - len(prefixes)))
                return
            high = content[j] - used[j]
            if j >= 1:
                high = min(high, before[j - 1] - used[j])
            if i >= 1:
                high = min(high, a[i - 1] + (above[j - 1] if j >= 1 else 0) - a[i] - prefix)
            for count in range(high + 1):
                used[j] += count
                fill_letter(j + 1, prefix + count, prefixes + [prefix + count])
                used[j] -= count

        fill_letter(0, 0, [])

    fill_row(0, [])
    return result


def tensor_decompose(a: HighestWeight, b: HighestWeight, state_cap: Optional[int] = None) -> MultiplicityMap:
    """Multiplicities of a x b; the enumeration stops with state_cap_exceeded past state_cap fillings."""
    _require_same_rank(a, b)
    shift_a, shift_b = a.parts[-1], b.parts[-1]
    base_a, base_b = a.shift(-shift_a).parts, b.shift(-shift_b).parts
    # Fewer letters make for fewer fillings; the coefficients are symmetric.
    if sum(base_b) > sum(base_a):
        base_a, base_b = base_b, base_a
    cap = state_cap if state_cap is not None else limit("STATE_CAP")
    counts = _lr_partitions(base_a, base_b, cap)
    shift = shift_a + shift_b
    return {HighestWeight(nu).shift(shift): count for nu, count in sorted(counts.items(), reverse=True)}


def branch_one_step(w: HighestWeight) -> MultiplicityMap:
    if w.d < 2:
        raise ValidationError("Branching needs d >= 2.", code="rank_too_small")
    ranges = [range(w.parts[i + 1], w.parts[i] + 1) for i in range(w.d - 1)]
    return {HighestWeight(mu): 1 for mu in sorted(itertools.product(*ranges), reverse=True)}


def restriction_multiplicities(w: HighestWeight, d: int) -> MultiplicityMap:
    """Multiplicity of each U(d) weight = number of interlacing chains from w down to it."""
    if not 1 <= d < w.d:
        raise ValidationError(f"Restriction needs 1 <= d < {w.d}, got d={d}.", code="invalid_range")
    cap = limit("STATE_CAP")
    current: Counter = Counter({w: 1})
    for rank in range(w.d, d, -1):
        following: Counter = Counter()
        for weight, multiplicity in current.items():
            for child in branch_one_step(weight):
                following[child] += multiplicity
        if len(following) > cap:
            raise ValidationError(
                f"Restriction of {w} to U({rank - 1}) exceeds the state cap ({len(following)} > {cap} weights); "
                "use a smaller weight or raise STATE_CAP.",
                code="state_cap_exceeded",
            )
        current = following
        logger.debug("Branching to U(%s): %s weights", rank - 1, len(current))
    return dict(current)


def restrict(w: HighestWeight, d: int) -> WeightMeasure:
    return WeightMeasure.from_multiplicities(restriction_multiplicities(w, d))


def measure_of_rep(parts: Iterable[Tuple[HighestWeight, int]]) -> WeightMeasure:
    multiplicities: Counter = Counter()
    for weight, multiplicity in parts:
        if multiplicity < 1:
            raise ValidationError(f"Multiplicity of {weight} must be >= 1.", code="empty_representation")
        multiplicities[weight] += multiplicity
    return WeightMeasure.from_multiplicities(multiplicities)


def _pieri_step(states: Counter) -> Counter:
    following: Counter = Counter()
    for weight, multiplicity in states.items():
        parts = weight.parts
        for i in range(weight.d):
            if i == 0 or parts[i - 1] > parts[i]:
                grown = parts[:i] + (parts[i] + 1,) + parts[i + 1:]
                following[HighestWeight(grown)] += multiplicity
    return following


def tensor_power_measure(w: HighestWeight, n: int, state_cap: Optional[int] = None) -> WeightMeasure:
    """Exact law of the random highest weight of the n-th tensor power of w."""
    if n < 1:
        raise ValidationError(f"Tensor power needs n >= 1, got {n}.", code="invalid_range")
    cap = state_cap if state_cap is not None else limit("STATE_CAP")
    pieri = w == HighestWeight.defining(w.d)
    states: Counter = Counter({w: 1})
    for step in range(2, n + 1):
        if pieri:
            states = _pieri_step(states)
        else:
            following: Counter = Counter()
            for weight, multiplicity in states.items():
                for child, coefficient in tensor_decompose(weight, w, state_cap=cap).items():
                    following[child] += multiplicity * coefficient
            states = following
        if len(states) > cap:
            raise ValidationError(
                f"Tensor power {w}^{n} exceeds the state cap ({len(states)} > {cap} weights at step {step}); "
                "use a smaller power or raise STATE_CAP.",
                code="state_cap_exceeded",
            )
        logger.debug("Tensor power %s step %s: %s weights", w, step, len(states))
    return WeightMeasure.from_multiplicities(states)


def spin_projection_measure(two_j: int) -> Dict[int, Fraction]:
    """
    Law of J_z in the spin-j representation of SU(2), keyed by 2*J_z.

    Spin j is the U(2) weight (2j, 0) up to a determinant twist; restricting to
    U(1) and shifting by -j gives {-j, ..., j}.
    """
    if two_j < 0:
        raise ValidationError(f"Spin needs 2j >= 0, got {two_j}.", code="invalid_range")
    measure = restrict(HighestWeight.of(two_j, 0), 1)
    return {2 * weight.parts[0] - two_j: entry.probability for weight, entry in sorted(measure.entries.items())}


def _is_rational(value) -> bool:
    return isinstance(value, numbers.Rational)


def moments_power_sums(
    m: WeightMeasure,
    ks: Sequence[int],
    eps: Scalar = 1,
    center: Optional[Sequence[Scalar]] = None,
) -> Scalar:
    """
    E[prod_j p_{k_j}(eps * lambda - center)] over the measure.

    Exact (a Fraction) when eps and center are rational. Otherwise the binary
    values of eps and center are taken exactly and the sum is rounded once to
    a float.
    """
    ks = tuple(ks)
    if any(int(k) != k or k < 1 for k in ks):
        raise ValidationError(f"Moment indices must be positive integers, got {ks}.", code="invalid_range")
    if center is not None and len(center) != m.d:
        raise ValidationError(f"Center has length {len(center)}, expected {m.d}.", code="rank_mismatch")
    shift = tuple(center) if center is not None else (0,) * m.d
    exact = _is_rational(eps) and all(_is_rational(value) for value in shift)
    # Fraction(float) is the exact binary value.
    eps_q = Fraction(eps) if _is_rational(eps) else Fraction(float(eps))
    shift_q = tuple(Fraction(value) if _is_rational(value) else Fraction(float(value)) for value in shift)
    total = Fraction(0)
    for weight, entry in m.entries.items():
        point = [eps_q * value - c for value, c in zip(weight.parts, shift_q)]
        term = entry.probability
        for k in ks:
            term *= sum(coordinate**k for coordinate in point)
        total += term
    return total if exact else float(total)
