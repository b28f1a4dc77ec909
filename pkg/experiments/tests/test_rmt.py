import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy.stats import wasserstein_distance

from experiments import rmt
from experiments.compare import wasserstein1_uniform


def random_hermitian_batch(generator, d, count):
    raw = generator.standard_normal((count, d, d)) + 1j * generator.standard_normal((count, d, d))
    return (raw + np.conj(np.swapaxes(raw, 1, 2))) / 2


def three_standard_errors(first, second):
    return 3 * np.sqrt(first.var(ddof=1) / len(first) + second.var(ddof=1) / len(second))


class RngStreamTests(SimpleTestCase):
    def test_same_seed_same_stream(self):
        first = rmt.RngStream(42, 3).generator.standard_normal(5)
        second = rmt.RngStream(42, 3).generator.standard_normal(5)
        np.testing.assert_array_equal(first, second)

    def test_stream_ids_and_children_differ(self):
        base = rmt.RngStream(42, 0)
        other = rmt.RngStream(42, 1)
        self.assertFalse(np.array_equal(base.generator.standard_normal(5), other.generator.standard_normal(5)))
        parent = rmt.RngStream(7)
        child_a, child_b = parent.spawn(), parent.spawn()
        self.assertFalse(np.array_equal(child_a.generator.standard_normal(5), child_b.generator.standard_normal(5)))

    def test_invalid_seed(self):
        for seed in (-1, 2**64, 1.5):
            with self.assertRaises(ValidationError):
                rmt.RngStream(seed)


class HaarTests(SimpleTestCase):
    def test_unitarity(self):
        rng = rmt.RngStream(1)
        for d in (1, 2, 5, 16):
            unitaries = rmt.sample_haar_unitaries(d, 50, rng)
            products = unitaries @ np.conj(np.swapaxes(unitaries, 1, 2))
            defect = np.linalg.norm(products - np.eye(d), axis=(1, 2)).max()
            self.assertLessEqual(defect, 1e-12 * np.sqrt(d))

    def test_first_entry_second_moment(self):
        d, count = 3, 40_000
        unitaries = rmt.sample_haar_unitaries(d, count, rmt.RngStream(2))
        values = np.abs(unitaries[:, 0, 0]) ** 2
        standard_error = values.std(ddof=1) / np.sqrt(count)
        self.assertLessEqual(abs(values.mean() - 1 / d), 4 * standard_error)

    def test_single_draw(self):
        rng = rmt.RngStream(21)
        for d in (1, 3):
            unitary = rmt.sample_haar_unitary(d, rng)
            self.assertEqual(unitary.shape, (d, d))
            np.testing.assert_allclose(unitary @ unitary.conj().T, np.eye(d), atol=1e-12)

    def test_rank_one_phase_is_uniform(self):
        count = 20_000
        phases = rmt.sample_haar_unitaries(1, count, rmt.RngStream(22))[:, 0, 0]
        np.testing.assert_allclose(np.abs(phases), np.ones(count), atol=1e-12)
        # Each component of e^{i theta} has variance 1/2 under the uniform law.
        bound = 3 * np.sqrt(0.5 / count)
        self.assertLessEqual(abs(phases.real.mean()), bound)
        self.assertLessEqual(abs(phases.imag.mean()), bound)
        self.assertLessEqual(wasserstein1_uniform(np.angle(phases), None, -np.pi, np.pi), 0.05)

    def test_orthogonal_rotations(self):
        rotations = rmt.sample_haar_orthogonal(3, 200, rmt.RngStream(3))
        np.testing.assert_allclose(rotations @ np.swapaxes(rotations, 1, 2), np.broadcast_to(np.eye(3), (200, 3, 3)), atol=1e-12)
        np.testing.assert_allclose(np.linalg.det(rotations), np.ones(200), atol=1e-12)


class EigensolverTests(SimpleTestCase):
    def test_residual_on_random_hermitian(self):
        generator = np.random.default_rng(10)
        total = 0
        for d in range(1, 17):
            arrays = random_hermitian_batch(generator, d, 63)
            values, vectors = rmt.eigh_jacobi_batch(arrays)
            total += len(arrays)
            self.assertTrue(np.all(np.diff(values, axis=1) <= 0))
            residual = np.linalg.norm(arrays @ vectors - vectors * values[:, None, :], axis=(1, 2))
            scale = np.maximum(1.0, np.linalg.norm(arrays, axis=(1, 2)))
            self.assertTrue(np.all(residual <= 1e-10 * scale), d)
            np.testing.assert_allclose(values, np.linalg.eigvalsh(arrays)[:, ::-1], atol=1e-10 * scale.max())
        self.assertGreaterEqual(total, 1000)

    def test_single_matrix_api(self):
        matrix = rmt.HermitianMatrix([[2, 1j], [-1j, 2]])
        np.testing.assert_allclose(rmt.eigenvalues_hermitian(matrix), [3.0, 1.0], atol=1e-12)

    def test_non_convergence(self):
        with self.assertRaises(rmt.EigensolverError):
            rmt.eigh_jacobi_batch(np.array([[1.0, 2.0], [2.0, -1.0]]), max_sweeps=0)


class HermitianMatrixTests(SimpleTestCase):
    def test_rejects_non_hermitian(self):
        with self.assertRaises(ValidationError) as caught:
            rmt.HermitianMatrix([[0, 1], [2, 0]])
        self.assertEqual(caught.exception.code, "not_hermitian")

    def test_corner(self):
        matrix = rmt.HermitianMatrix.diagonal([3.0, 2.0, 1.0])
        self.assertEqual(rmt.corner(matrix, 2).d, 2)
        with self.assertRaises(ValidationError):
            rmt.corner(matrix, 4)


class InvariantModelTests(SimpleTestCase):
    def test_orbit_keeps_spectrum(self):
        model = rmt.InvariantMatrixModel.with_eigenvalues([3.0, -1.0, 0.5])
        matrices = rmt.sample_invariant_batch(model, 100, rmt.RngStream(4))
        values, _ = rmt.eigh_jacobi_batch(matrices)
        np.testing.assert_allclose(values, np.broadcast_to([3.0, 0.5, -1.0], (100, 3)), atol=1e-10)

    def test_custom_eigenvalue_law(self):
        model = rmt.InvariantMatrixModel(
            d=2, eigenvalue_sampler=lambda rng: np.sort(rng.generator.standard_normal(2))[::-1]
        )
        matrix = rmt.sample_invariant(model, rmt.RngStream(5))
        self.assertEqual(matrix.d, 2)

    def test_sum_of_orbits(self):
        model_a = rmt.InvariantMatrixModel.with_eigenvalues([1.0, 0.0])
        model_b = rmt.InvariantMatrixModel.with_eigenvalues([2.0, 0.0])
        first = rmt.sum_independent_batch(model_a, model_b, 50, rmt.RngStream(6))
        second = rmt.sum_independent_batch(model_a, model_b, 50, rmt.RngStream(6))
        np.testing.assert_array_equal(first, second)
        np.testing.assert_allclose(np.trace(first, axis1=1, axis2=2).real, np.full(50, 3.0), atol=1e-12)
        values, _ = rmt.eigh_jacobi_batch(first)
        self.assertTrue(np.all(values[:, 0] <= 3.0 + 1e-12) and np.all(values[:, 0] >= 2.0 - 1e-12))

    def test_first_entry_mean(self):
        model = rmt.InvariantMatrixModel.with_eigenvalues([1.0, 0.0])
        entries = rmt.sample_invariant_batch(model, 100_000, rmt.RngStream(12))[:, 0, 0].real
        standard_error = entries.std(ddof=1) / np.sqrt(len(entries))
        self.assertLessEqual(abs(entries.mean() - 0.5), 3 * standard_error)
        single = rmt.sample_invariant(model, rmt.RngStream(12))
        self.assertAlmostEqual(single.trace(), 1.0, places=12)
        np.testing.assert_allclose(rmt.eigenvalues_hermitian(single), [1.0, 0.0], atol=1e-10)

    def test_corner_law_is_conjugation_invariant(self):
        model = rmt.InvariantMatrixModel.with_eigenvalues([3.0, 1.0, 0.0])
        fixed = rmt.sample_haar_unitary(3, rmt.RngStream(13))
        plain, rotated = rmt.RngStream(14), rmt.RngStream(15)
        count = 4_000
        before = np.array([rmt.corner(rmt.sample_invariant(model, plain), 1).trace() for _ in range(count)])
        after = np.array(
            [rmt.corner(rmt.sample_invariant(model, rotated).conjugate_by(fixed), 1).trace() for _ in range(count)]
        )
        self.assertLessEqual(wasserstein_distance(before, after), three_standard_errors(before, after))

    def test_sum_is_symmetric_in_law(self):
        model_a = rmt.InvariantMatrixModel.with_eigenvalues([2.0, 0.0, 0.0])
        model_b = rmt.InvariantMatrixModel.with_eigenvalues([1.0, 1.0, -1.0])
        count = 20_000
        forward = rmt.eigh_jacobi_batch(rmt.sum_independent_batch(model_a, model_b, count, rmt.RngStream(16)))[0]
        backward = rmt.eigh_jacobi_batch(rmt.sum_independent_batch(model_b, model_a, count, rmt.RngStream(17)))[0]
        for column in range(3):
            first, second = forward[:, column], backward[:, column]
            self.assertLessEqual(wasserstein_distance(first, second), three_standard_errors(first, second), column)
        single = rmt.sum_independent(model_a, model_b, rmt.RngStream(18))
        self.assertAlmostEqual(single.trace(), 3.0, places=12)

    def test_sum_rank_mismatch(self):
        with self.assertRaises(ValidationError):
            rmt.sum_independent(
                rmt.InvariantMatrixModel.with_eigenvalues([1.0]),
                rmt.InvariantMatrixModel.with_eigenvalues([1.0, 0.0]),
                rmt.RngStream(0),
            )


class GaussianTests(SimpleTestCase):
    def test_covariance_and_trace(self):
        d, v, count = 3, 0.5, 40_000
        samples = rmt.sample_gue_v_batch(d, v, count, rmt.RngStream(8))
        np.testing.assert_allclose(samples, np.conj(np.swapaxes(samples, 1, 2)))
        trace_part = np.trace(samples, axis1=1, axis2=2).real / d
        self.assertAlmostEqual(trace_part.var(), v, delta=0.05 * v)
        self.assertAlmostEqual(np.mean(np.abs(samples[:, 0, 1]) ** 2), 1.0, delta=0.05)

    def test_traceless_when_v_is_zero(self):
        samples = rmt.sample_gue_v_batch(2, 0.0, 100, rmt.RngStream(9))
        np.testing.assert_allclose(np.trace(samples, axis1=1, axis2=2), np.zeros(100), atol=1e-12)

    def test_negative_variance(self):
        with self.assertRaises(ValidationError) as caught:
            rmt.sample_gue_v(2, -1.0, rmt.RngStream(0))
        self.assertEqual(caught.exception.code, "negative_variance")


class AngularMomentumTests(SimpleTestCase):
    def test_orbit_is_antisymmetric_with_fixed_length(self):
        matrices = rmt.antisymmetric_orbit_batch(2.0, 500, rmt.RngStream(11))
        np.testing.assert_allclose(matrices, -np.swapaxes(matrices, 1, 2), atol=1e-12)
        components = rmt.angular_momentum_components(matrices)
        np.testing.assert_allclose(np.linalg.norm(components, axis=1), np.full(500, 2.0), atol=1e-12)

    def test_radius_must_be_positive(self):
        with self.assertRaises(ValidationError):
            rmt.antisymmetric_orbit_batch(0.0, 1, rmt.RngStream(0))


class ReplicaTests(SimpleTestCase):
    def draw(self, rng, count):
        return rng.generator.standard_normal(count)

    def test_thread_count_does_not_change_output(self):
        serial = rmt.sample_in_replicas(5, 2_500, self.draw, replica_size=300, threads=1)
        parallel = rmt.sample_in_replicas(5, 2_500, self.draw, replica_size=300, threads=4)
        self.assertEqual(serial.shape, (2_500,))
        np.testing.assert_array_equal(serial, parallel)

    def test_needs_samples(self):
        with self.assertRaises(ValidationError):
            rmt.sample_in_replicas(5, 0, self.draw)
