from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from django.core.exceptions import ValidationError


@dataclass(frozen=True, order=True)
class HighestWeight:
    """
    Dominant integer weight of U(d): parts[0] >= parts[1] >= ... >= parts[d-1].

    Entries may be negative; a negative weight is a polynomial representation
    twisted by a power of the determinant.
    """

    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValidationError("A highest weight needs rank d >= 1.", code="rank_too_small")
        for value in parts:
            if isinstance(value, bool) or int(value) != value:
                raise ValidationError(f"Weight entries must be integers, got {value!r}.", code="not_dominant")
        parts = tuple(int(value) for value in parts)
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValidationError(f"Weight {parts} is not non-increasing.", code="not_dominant")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "HighestWeight":
        return cls(tuple(parts))

    @classmethod
    def zero(cls, d: int) -> "HighestWeight":
        return cls((0,) * d)

    @classmethod
    def defining(cls, d: int) -> "HighestWeight":
        return cls((1,) + (0,) * (d - 1))

    @classmethod
    def parse(cls, text: str) -> "HighestWeight":
        try:
            parts = tuple(int(chunk) for chunk in text.split(","))
        except ValueError as exc:
            raise ValidationError(f"Cannot parse weight {text!r}: {exc}", code="parse_error") from exc
        return cls(parts)

    @property
    def d(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def shift(self, c: int) -> "HighestWeight":
        """Twist by det**c."""
        return HighestWeight(tuple(value + c for value in self.parts))

    def scale(self, factor: int) -> "HighestWeight":
        return HighestWeight(tuple(value * factor for value in self.parts))

    def dual(self) -> "HighestWeight":
        return HighestWeight(tuple(-value for value in reversed(self.parts)))

    def label(self) -> str:
        return ",".join(str(value) for value in self.parts)

    def __str__(self) -> str:
        return f"({self.label()})"


@dataclass(frozen=True)
class ChamberPoint:
    """Sorted (non-increasing) representative of a point of the Weyl chamber."""

    x: Tuple[float, ...]

    @property
    def d(self) -> int:
        return len(self.x)


def dim_weyl(w: HighestWeight) -> int:
    numerator = 1
    denominator = 1
    parts = w.parts
    for i in range(w.d):
        for j in range(i + 1, w.d):
            numerator *= parts[i] - parts[j] + j - i
            denominator *= j - i
    return numerator // denominator


def sort_to_chamber(v: Sequence[float]) -> ChamberPoint:
    values = tuple(v)
    if not values:
        raise ValidationError("Cannot sort an empty vector.", code="rank_too_small")
    if not all(math.isfinite(float(value)) for value in values):
        raise ValidationError(f"Vector {values} has non-finite entries.", code="non_finite")
    # sorted() is stable under reverse=True, so ties keep input order.
    return ChamberPoint(tuple(sorted(values, reverse=True)))


def casimir_value(w: HighestWeight) -> Fraction:
    """
    Eigenvalue of -sum x_i^2 over an orthonormal basis of u(d) for <x, y> = Tr x y*.
    """
    d = w.d
    total = sum(value * (value + d + 1 - 2 * i) for i, value in enumerate(w.parts, start=1))
    return Fraction(total)


def common_rank(weights: Iterable[HighestWeight]) -> int:
    ranks = {weight.d for weight in weights}
    if len(ranks) != 1:
        raise ValidationError(f"Weights of mixed ranks {sorted(ranks)}.", code="rank_mismatch")
    return ranks.pop()


def weyl_vector(d: int) -> Tuple[Fraction, ...]:
    """Half-sum of positive roots, ((d-1)/2, (d-3)/2, ..., -(d-1)/2)."""
    return tuple(Fraction(d - 1 - 2 * i, 2) for i in range(d))
