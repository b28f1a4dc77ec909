from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from django.core.exceptions import ValidationError

from representations.conf import limit

logger = logging.getLogger(__name__)

_UINT64 = 2**64


class EigensolverError(RuntimeError):
    """Jacobi sweeps did not reach the off-diagonal threshold."""


class RngStream:
    """
    Seeded random stream. (seed, stream_id) fixes the whole sequence; spawn()
    hands out independent child streams in a reproducible order.
    """

    def __init__(self, seed: int, stream_id: int = 0, *, _sequence: Optional[np.random.SeedSequence] = None):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if isinstance(value, bool) or int(value) != value or not 0 <= int(value) < _UINT64:
                raise ValidationError(f"{name} must be a 64-bit unsigned integer, got {value!r}.", code="invalid_range")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._sequence = _sequence or np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(self._sequence))

    def spawn(self) -> "RngStream":
        (child,) = self._sequence.spawn(1)
        return RngStream(self.seed, self.stream_id, _sequence=child)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, key={self._sequence.spawn_key})"


class HermitianMatrix:
    """d x d complex self-adjoint matrix, symmetrized on construction."""

    __slots__ = ("array",)

    def __init__(self, entries):
        matrix = np.array(entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise ValidationError(f"Expected a square matrix, got shape {matrix.shape}.", code="not_hermitian")
        defect = np.linalg.norm(matrix - matrix.conj().T)
        if defect > limit("HERMITIAN_DEFECT") * np.linalg.norm(matrix):
            raise ValidationError(f"Matrix is not Hermitian (defect {defect:.3e}).", code="not_hermitian")
        matrix = (matrix + matrix.conj().T) / 2
        matrix.setflags(write=False)
        self.array = matrix

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def d(self) -> int:
        return self.array.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.array).real)

    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def conjugate_by(self, U: np.ndarray) -> "HermitianMatrix":
        return HermitianMatrix(U @ self.array @ U.conj().T)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        if other.d != self.d:
            raise ValidationError(f"Rank mismatch: {self.d} vs {other.d}.", code="rank_mismatch")
        return HermitianMatrix(self.array + other.array)

    def __repr__(self) -> str:
        return f"HermitianMatrix(d={self.d})"


@dataclass(frozen=True)
class InvariantMatrixModel:
    """
    U * diag(lambda) * U^H with U Haar and lambda drawn from eigenvalue_sampler,
    independently of U.
    """

    d: int
    eigenvalue_sampler: Callable[[RngStream], np.ndarray]
    description: str = "custom eigenvalue law"
    fixed_eigenvalues: Optional[Tuple[float, ...]] = None

    @classmethod
    def with_eigenvalues(cls, values: Sequence[float]) -> "InvariantMatrixModel":
        fixed = tuple(float(value) for value in values)
        if not fixed or not np.all(np.isfinite(fixed)):
            raise ValidationError(f"Eigenvalues {values} must be finite and non-empty.", code="non_finite")
        return cls(
            d=len(fixed),
            eigenvalue_sampler=lambda rng: np.array(fixed),
            description=f"orbit of diag{fixed}",
            fixed_eigenvalues=fixed,
        )

    def draw_eigenvalues(self, rng: RngStream) -> np.ndarray:
        values = np.asarray(self.eigenvalue_sampler(rng), dtype=float)
        if values.shape != (self.d,) or not np.all(np.isfinite(values)):
            raise ValidationError(f"Sampler returned {values!r}, expected {self.d} finite reals.", code="non_finite")
        return values

    def draw_eigenvalue_batch(self, rng: RngStream, count: int) -> np.ndarray:
        if self.fixed_eigenvalues is not None:
            return np.broadcast_to(np.array(self.fixed_eigenvalues), (count, self.d)).copy()
        return np.stack([self.draw_eigenvalues(rng) for _ in range(count)]) if count else np.empty((0, self.d))


def _require_rank(d: int) -> None:
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise ValidationError(f"Rank must be a positive integer, got {d!r}.", code="rank_too_small")


def _hermitize(arrays: np.ndarray) -> np.ndarray:
    return (arrays + np.conj(np.swapaxes(arrays, -1, -2))) / 2


def sample_haar_unitaries(d: int, count: int, rng: RngStream) -> np.ndarray:
    """
    QR of complex Ginibre matrices with R's diagonal made real positive.
    Without the phase fix the Q factor is not Haar distributed.
    """
    _require_rank(d)
    generator = rng.generator
    ginibre = (generator.standard_normal((count, d, d)) + 1j * generator.standard_normal((count, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(ginibre)
    diagonal = np.diagonal(r, axis1=-2, axis2=-1).copy()
    magnitude = np.abs(diagonal)
    singular = np.flatnonzero((magnitude < np.finfo(float).tiny).any(axis=1))
    if singular.size:
        logger.warning("Redrawing %s numerically singular Ginibre matrices", singular.size)
        q[singular] = sample_haar_unitaries(d, singular.size, rng)
        diagonal[singular] = 1.0
        magnitude[singular] = 1.0
    phases = diagonal / magnitude
    return q * phases[:, None, :]


def sample_haar_unitary(d: int, rng: RngStream) -> np.ndarray:
    return sample_haar_unitaries(d, 1, rng)[0]


def sample_haar_orthogonal(d: int, count: int, rng: RngStream, special: bool = True) -> np.ndarray:
    """Haar on O(d), or on SO(d) when special: one column sign flip fixes det = +1."""
    _require_rank(d)
    gaussian = rng.generator.standard_normal((count, d, d))
    q, r = np.linalg.qr(gaussian)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    q = q * signs[:, None, :]
    if special:
        flip = np.linalg.det(q) < 0
        q[flip, :, 0] *= -1
    return q


def sample_invariant_batch(model: InvariantMatrixModel, count: int, rng: RngStream) -> np.ndarray:
    eigenvalues = model.draw_eigenvalue_batch(rng, count)
    unitaries = sample_haar_unitaries(model.d, count, rng)
    matrices = (unitaries * eigenvalues[:, None, :]) @ np.conj(np.swapaxes(unitaries, -1, -2))
    return _hermitize(matrices)


def sample_invariant(model: InvariantMatrixModel, rng: RngStream) -> HermitianMatrix:
    eigenvalues = model.draw_eigenvalue_batch(rng, 1)[0]
    return HermitianMatrix.diagonal(eigenvalues).conjugate_by(sample_haar_unitary(model.d, rng))


def corner(A: HermitianMatrix, d: int) -> HermitianMatrix:
    if not 1 <= d <= A.d:
        raise ValidationError(f"Corner size must satisfy 1 <= d <= {A.d}, got {d}.", code="invalid_range")
    return HermitianMatrix(A.array[:d, :d])


def sample_gue_v_batch(d: int, v: float, count: int, rng: RngStream) -> np.ndarray:
    """
    g - tr(g) I + x I with g GUE (unit covariance E g_ij conj(g_kl) = delta_il delta_jk)
    and x ~ N(0, v) independent.
    """
    _require_rank(d)
    if v < 0:
        raise ValidationError(f"GUE_v needs v >= 0, got {v}.", code="negative_variance")
    generator = rng.generator
    upper = np.triu_indices(d, k=1)
    g = np.zeros((count, d, d), dtype=complex)
    diagonal = generator.standard_normal((count, d))
    g[:, np.arange(d), np.arange(d)] = diagonal
    off = (generator.standard_normal((count, len(upper[0]))) + 1j * generator.standard_normal((count, len(upper[0])))) / np.sqrt(2)
    g[:, upper[0], upper[1]] = off
    g[:, upper[1], upper[0]] = np.conj(off)
    x = np.sqrt(v) * generator.standard_normal(count)
    shift = x - diagonal.sum(axis=1) / d
    g[:, np.arange(d), np.arange(d)] += shift[:, None]
    return g


def sample_gue_v(d: int, v: float, rng: RngStream) -> HermitianMatrix:
    return HermitianMatrix(sample_gue_v_batch(d, v, 1, rng)[0])


def eigh_jacobi_batch(
    arrays: np.ndarray,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi on a stack of Hermitian matrices.

    Each (p, q) rotation is diag(1, e^{-i phi}) followed by a real Givens
    rotation, phi being the phase of A[p, q]. Returns eigenvalues sorted
    non-increasing and the matching eigenvector columns.
    """
    tol = limit("JACOBI_TOLERANCE") if tol is None else tol
    max_sweeps = limit("JACOBI_MAX_SWEEPS") if max_sweeps is None else max_sweeps
    A = np.array(arrays, dtype=complex)
    if A.ndim == 2:
        A = A[None]
    count, d, _ = A.shape
    V = np.broadcast_to(np.eye(d, dtype=complex), A.shape).copy()
    norms = np.linalg.norm(A, axis=(1, 2))
    off_mask = ~np.eye(d, dtype=bool)

    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(A[:, off_mask]) ** 2, axis=1))
        if np.all(off <= tol * norms):
            logger.debug("Jacobi converged after %s sweeps on %s matrices", sweep, count)
            break
        if sweep == max_sweeps:
            raise EigensolverError(f"Jacobi did not converge in {max_sweeps} sweeps (max off-norm {off.max():.3e}).")
        for p in range(d - 1):
            for q in range(p + 1, d):
                b = A[:, p, q]
                magnitude = np.abs(b)
                active = magnitude > 0
                safe = np.where(active, magnitude, 1.0)
                phase = np.where(active, b / safe, 1.0)
                theta = (A[:, q, q].real - A[:, p, p].real) / (2 * safe)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta**2 + 1))
                t = np.where(active, t, 0.0)
                c = 1 / np.sqrt(t**2 + 1)
                s = t * c
                G = np.empty((count, 2, 2), dtype=complex)
                G[:, 0, 0] = c
                G[:, 0, 1] = s
                G[:, 1, 0] = -s * np.conj(phase)
                G[:, 1, 1] = c * np.conj(phase)
                pair = [p, q]
                A[:, :, pair] = A[:, :, pair] @ G
                A[:, pair, :] = np.conj(np.swapaxes(G, 1, 2)) @ A[:, pair, :]
                A[:, p, q] = 0
                A[:, q, p] = 0
                V[:, :, pair] = V[:, :, pair] @ G

    values = np.diagonal(A, axis1=1, axis2=2).real
    order = np.argsort(-values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    vectors = np.take_along_axis(V, order[:, None, :], axis=2)
    return values, vectors


def eigh_jacobi(A: HermitianMatrix) -> Tuple[np.ndarray, np.ndarray]:
    values, vectors = eigh_jacobi_batch(A.array)
    return values[0], vectors[0]


def eigenvalues_hermitian(A: HermitianMatrix) -> np.ndarray:
    return eigh_jacobi(A)[0]


def sum_independent_batch(
    model_a: InvariantMatrixModel, model_b: InvariantMatrixModel, count: int, rng: RngStream
) -> np.ndarray:
    if model_a.d != model_b.d:
        raise ValidationError(f"Rank mismatch: {model_a.d} vs {model_b.d}.", code="rank_mismatch")
    first = sample_invariant_batch(model_a, count, rng.spawn())
    second = sample_invariant_batch(model_b, count, rng.spawn())
    return first + second


def sum_independent(model_a: InvariantMatrixModel, model_b: InvariantMatrixModel, rng: RngStream) -> HermitianMatrix:
    return HermitianMatrix(sum_independent_batch(model_a, model_b, 1, rng)[0])


def antisymmetric_orbit_batch(radius: float, count: int, rng: RngStream) -> np.ndarray:
    """
    O J0 O^T with O Haar on SO(3), J0 the angular-momentum matrix of (0, 0, radius);
    spectrum {0, +i radius, -i radius}.
    """
    if radius <= 0:
        raise ValidationError(f"|J| must be positive, got {radius}.", code="invalid_range")
    base = np.array([[0.0, radius, 0.0], [-radius, 0.0, 0.0], [0.0, 0.0, 0.0]])
    rotations = sample_haar_orthogonal(3, count, rng, special=True)
    return rotations @ base @ np.swapaxes(rotations, -1, -2)


def angular_momentum_components(matrices: np.ndarray) -> np.ndarray:
    """(J_x, J_y, J_z) read off [[0, Jz, -Jy], [-Jz, 0, Jx], [Jy, -Jx, 0]]."""
    return np.stack([matrices[:, 1, 2], matrices[:, 2, 0], matrices[:, 0, 1]], axis=1)


def sample_in_replicas(
    seed: int,
    total: int,
    draw: Callable[[RngStream, int], np.ndarray],
    replica_size: Optional[int] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    Split total samples into fixed blocks, one stream-id per block, and stack
    the blocks in stream-id order; the thread count never changes the output.
    """
    if total < 1:
        raise ValidationError(f"Need at least one sample, got {total}.", code="too_few_samples")
    block = replica_size or limit("REPLICA_SIZE")
    workers = max(1, threads or limit("THREADS"))
    sizes = [min(block, total - start) for start in range(0, total, block)]

    def run(stream_id: int) -> np.ndarray:
        return draw(RngStream(seed, stream_id), sizes[stream_id])

    logger.info("Sampling %s draws in %s replicas on %s threads", total, len(sizes), workers)
    if workers == 1:
        parts = [run(stream_id) for stream_id in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    return np.concatenate(parts, axis=0)
