"""
Normalized traces of products of tensor-power operators.

On (C^d)^{otimes n} the operator rho(x) = sum_j 1 x ... x x_j x ... x 1 is a sum
of n commuting legs, so tr[rho(x_1) ... rho(x_k)] expands over set partitions of
the k slots: each block is carried by one leg, distinct blocks by distinct legs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np
from django.core.exceptions import ValidationError

from .conf import limit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LieElement:
    """Element iH of u(d), stored through its Hermitian matrix H."""

    H: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.H, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise ValidationError(f"Expected a square matrix, got shape {matrix.shape}.", code="not_hermitian")
        defect = np.linalg.norm(matrix - matrix.conj().T)
        if defect > limit("HERMITIAN_DEFECT") * max(1.0, np.linalg.norm(matrix)):
            raise ValidationError(f"Matrix is not Hermitian (defect {defect:.3e}).", code="not_hermitian")
        matrix = (matrix + matrix.conj().T) / 2
        matrix.setflags(write=False)
        object.__setattr__(self, "H", matrix)

    @classmethod
    def from_antihermitian(cls, X: np.ndarray) -> "LieElement":
        return cls(-1j * np.asarray(X, dtype=complex))

    @property
    def d(self) -> int:
        return self.H.shape[0]

    def antihermitian(self) -> np.ndarray:
        return 1j * self.H

    def trace(self) -> float:
        """Normalized trace Tr(H) / d."""
        return float(np.trace(self.H).real) / self.d

    def centered(self) -> "LieElement":
        return LieElement(self.H - self.trace() * np.eye(self.d))

    def norm(self) -> float:
        """Norm from <x, y> = Tr x y*."""
        return float(np.linalg.norm(self.H))

    def spectral_norm(self) -> float:
        return float(np.linalg.norm(self.H, 2))

    def __eq__(self, other) -> bool:
        return isinstance(other, LieElement) and np.array_equal(self.H, other.H)

    __hash__ = None


@dataclass(frozen=True)
class SetPartition:
    """Blocks of a partition of {1, ..., k}, each sorted, ordered by their smallest element."""

    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(block)) for block in self.blocks)
        if any(not block for block in blocks):
            raise ValidationError("Set partition blocks must be non-empty.", code="invalid_range")
        elements = sorted(element for block in blocks for element in block)
        if elements != list(range(1, len(elements) + 1)):
            raise ValidationError(f"Blocks {blocks} do not partition 1..{len(elements)}.", code="invalid_range")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def from_growth_string(cls, labels: Sequence[int]) -> "SetPartition":
        grouped: Dict[int, List[int]] = {}
        for position, label in enumerate(labels, start=1):
            grouped.setdefault(label, []).append(position)
        return cls(tuple(tuple(block) for _, block in sorted(grouped.items())))

    @property
    def k(self) -> int:
        return sum(len(block) for block in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)


def _check_order(k: int) -> None:
    cap = limit("MAX_MOMENT_ORDER")
    if k > cap:
        raise ValidationError(
            f"Moment order k={k} exceeds the cap {cap} (Bell({k}) partitions).", code="moment_order_cap"
        )


def restricted_growth_strings(k: int) -> Iterator[Tuple[int, ...]]:
    """Strings a_1 = 0, a_i <= 1 + max(a_1..a_{i-1}), in lexicographic order."""
    if k == 0:
        yield ()
        return

    def extend(prefix: List[int], top: int) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for label in range(top + 2):
            prefix.append(label)
            yield from extend(prefix, max(top, label))
            prefix.pop()

    yield from extend([0], 0)


def set_partitions(k: int) -> Iterator[SetPartition]:
    _check_order(k)
    for labels in restricted_growth_strings(k):
        yield SetPartition.from_growth_string(labels)


def pair_partitions(k: int) -> Iterator[SetPartition]:
    if k % 2:
        return

    def pairings(remaining: Tuple[int, ...]) -> Iterator[List[Tuple[int, int]]]:
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        for index, partner in enumerate(rest):
            for tail in pairings(rest[:index] + rest[index + 1:]):
                yield [(first, partner)] + tail

    for pairs in pairings(tuple(range(1, k + 1))):
        yield SetPartition(tuple(pairs))


def falling_factorial(n: int, m: int) -> int:
    result = 1
    for step in range(m):
        result *= n - step
    return result


def _common_rank(xs: Sequence[LieElement]) -> int:
    ranks = {x.d for x in xs}
    if len(ranks) > 1:
        raise ValidationError(f"Lie elements of mixed ranks {sorted(ranks)}.", code="rank_mismatch")
    return ranks.pop()


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Commutator of the anti-Hermitian forms, read back as i(H_x H_y - H_y H_x)."""
    _common_rank([x, y])
    X, Y = x.antihermitian(), y.antihermitian()
    return LieElement.from_antihermitian(X @ Y - Y @ X)


def _block_traces(matrices: Sequence[np.ndarray]):
    cache: Dict[Tuple[int, ...], complex] = {}
    d = matrices[0].shape[0]

    def block_trace(block: Tuple[int, ...]) -> complex:
        if block not in cache:
            product = np.eye(d, dtype=complex)
            for index in block:
                product = product @ matrices[index - 1]
            cache[block] = complex(np.trace(product)) / d
        return cache[block]

    return block_trace


def tensor_power_trace_moment(
    xs: Sequence[LieElement],
    n: int,
    centered: bool = False,
    eps: float = 1.0,
) -> complex:
    """
    Normalized trace of prod_i eps * (rho(x_i) - centered * n tr(x_i) Id) on the
    n-th tensor power of the defining representation.

    Words of non-commuting elements can have complex traces, so the value is
    returned as a complex number.
    """
    if not xs:
        raise ValidationError("Need at least one Lie element.", code="invalid_range")
    if n < 1:
        raise ValidationError(f"Tensor power needs n >= 1, got {n}.", code="invalid_range")
    _common_rank(xs)
    k = len(xs)
    _check_order(k)
    matrices = [(x.centered() if centered else x).H for x in xs]
    block_trace = _block_traces(matrices)

    total = 0j
    for partition in set_partitions(k):
        legs = falling_factorial(n, len(partition))
        if legs == 0:
            continue
        term = complex(legs)
        for block in partition.blocks:
            term *= block_trace(block)
        total += term
    return complex(eps**k * total)


def wick_limit_moment(xs: Sequence[LieElement]) -> complex:
    """Gaussian mixed moment with covariance tr(x~_i x~_j) of the centered elements."""
    if not xs:
        raise ValidationError("Need at least one Lie element.", code="invalid_range")
    _common_rank(xs)
    k = len(xs)
    _check_order(k)
    if k % 2:
        return 0j
    matrices = [x.centered().H for x in xs]
    block_trace = _block_traces(matrices)
    total = 0j
    for partition in pair_partitions(k):
        term = 1 + 0j
        for block in partition.blocks:
            term *= block_trace(block)
        total += term
    return total
