import itertools
import random
from fractions import Fraction

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from representations.weights import (
    HighestWeight,
    casimir_value,
    common_rank,
    dim_weyl,
    sort_to_chamber,
)


def count_gelfand_tsetlin_patterns(parts):
    """Brute-force dimension: number of interlacing triangles with top row parts."""
    if len(parts) == 1:
        return 1
    rows = itertools.product(*(range(parts[i + 1], parts[i] + 1) for i in range(len(parts) - 1)))
    return sum(count_gelfand_tsetlin_patterns(row) for row in rows)


def random_weight(rng, d, low=-3, high=5):
    return HighestWeight(tuple(sorted((rng.randint(low, high) for _ in range(d)), reverse=True)))


def unitary_lie_basis(d):
    """Orthonormal basis of u(d) for <x, y> = Tr x y*."""
    basis = []
    for j in range(d):
        element = np.zeros((d, d), dtype=complex)
        element[j, j] = 1j
        basis.append(element)
    for j, k in itertools.combinations(range(d), 2):
        real = np.zeros((d, d), dtype=complex)
        real[j, k], real[k, j] = 1, -1
        imaginary = np.zeros((d, d), dtype=complex)
        imaginary[j, k], imaginary[k, j] = 1j, 1j
        basis.extend([real / np.sqrt(2), imaginary / np.sqrt(2)])
    return basis


class HighestWeightTests(SimpleTestCase):
    def test_parse_and_label(self):
        weight = HighestWeight.parse("2, 1,0")
        self.assertEqual(weight.parts, (2, 1, 0))
        self.assertEqual(weight.d, 3)
        self.assertEqual(weight.size, 3)
        self.assertEqual(weight.label(), "2,1,0")
        self.assertEqual(str(weight), "(2,1,0)")

    def test_rejects_increasing_entries(self):
        with self.assertRaises(ValidationError) as caught:
            HighestWeight.of(0, 1)
        self.assertEqual(caught.exception.code, "not_dominant")

    def test_rejects_empty_and_non_integer(self):
        with self.assertRaises(ValidationError) as caught:
            HighestWeight(())
        self.assertEqual(caught.exception.code, "rank_too_small")
        with self.assertRaises(ValidationError) as caught:
            HighestWeight((1.5, 0))
        self.assertEqual(caught.exception.code, "not_dominant")

    def test_parse_error_code(self):
        with self.assertRaises(ValidationError) as caught:
            HighestWeight.parse("1,x")
        self.assertEqual(caught.exception.code, "parse_error")

    def test_shift_dual_and_ordering(self):
        weight = HighestWeight.of(2, 0, -1)
        self.assertEqual(weight.shift(1).parts, (3, 1, 0))
        self.assertEqual(weight.dual().parts, (1, 0, -2))
        self.assertEqual(weight.dual().dual(), weight)
        self.assertLess(HighestWeight.of(1, 1), HighestWeight.of(2, 0))

    def test_common_rank(self):
        self.assertEqual(common_rank([HighestWeight.of(1, 0), HighestWeight.of(0, 0)]), 2)
        with self.assertRaises(ValidationError) as caught:
            common_rank([HighestWeight.of(1, 0), HighestWeight.of(1, 0, 0)])
        self.assertEqual(caught.exception.code, "rank_mismatch")


class DimensionTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(dim_weyl(HighestWeight.of(2, 1, 0)), 8)
        self.assertEqual(dim_weyl(HighestWeight.of(1, 0)), 2)
        self.assertEqual(dim_weyl(HighestWeight.zero(4)), 1)
        self.assertEqual(dim_weyl(HighestWeight.of(0, -1)), 2)
        self.assertEqual(dim_weyl(HighestWeight.of(5)), 1)

    def test_matches_pattern_count(self):
        rng = random.Random(7)
        for _ in range(60):
            weight = random_weight(rng, rng.randint(1, 4), 0, 4)
            self.assertEqual(dim_weyl(weight), count_gelfand_tsetlin_patterns(weight.parts), weight)

    def test_invariant_under_twist_and_dual(self):
        rng = random.Random(11)
        for _ in range(100):
            weight = random_weight(rng, rng.randint(1, 5))
            self.assertEqual(dim_weyl(weight.shift(rng.randint(-4, 4))), dim_weyl(weight))
            self.assertEqual(dim_weyl(weight.dual()), dim_weyl(weight))


class CasimirTests(SimpleTestCase):
    def casimir_operator(self, d, legs):
        total = np.zeros((d**legs, d**legs), dtype=complex)
        for x in unitary_lie_basis(d):
            acting = sum(
                np.kron(np.kron(np.eye(d**position), x), np.eye(d ** (legs - position - 1)))
                for position in range(legs)
            )
            total -= acting @ acting
        return total

    def test_defining_and_dual(self):
        for d in range(1, 5):
            operator = self.casimir_operator(d, 1)
            np.testing.assert_allclose(operator, d * np.eye(d), atol=1e-12)
            self.assertEqual(casimir_value(HighestWeight.defining(d)), d)
            self.assertEqual(casimir_value(HighestWeight.defining(d).dual()), d)

    def test_symmetric_and_antisymmetric_squares(self):
        for d in range(2, 5):
            operator = self.casimir_operator(d, 2)
            swap = np.zeros((d * d, d * d))
            for i, j in itertools.product(range(d), repeat=2):
                swap[i * d + j, j * d + i] = 1
            symmetric = (np.eye(d * d) + swap) / 2
            antisymmetric = (np.eye(d * d) - swap) / 2
            sym_value = casimir_value(HighestWeight((2,) + (0,) * (d - 1)))
            anti_value = casimir_value(HighestWeight((1, 1) + (0,) * (d - 2)))
            np.testing.assert_allclose(operator @ symmetric, float(sym_value) * symmetric, atol=1e-12)
            np.testing.assert_allclose(operator @ antisymmetric, float(anti_value) * antisymmetric, atol=1e-12)

    def test_exact_value(self):
        self.assertEqual(casimir_value(HighestWeight.of(2, 1, 0)), Fraction(9))
        self.assertEqual(casimir_value(HighestWeight.zero(3)), 0)


class ChamberTests(SimpleTestCase):
    def test_sorts_non_increasing(self):
        self.assertEqual(sort_to_chamber([0.5, 2.0, -1.0]).x, (2.0, 0.5, -1.0))
        self.assertEqual(sort_to_chamber([1, 1]).d, 2)

    def test_rejects_empty_and_non_finite(self):
        with self.assertRaises(ValidationError) as caught:
            sort_to_chamber([])
        self.assertEqual(caught.exception.code, "rank_too_small")
        with self.assertRaises(ValidationError) as caught:
            sort_to_chamber([1.0, float("nan")])
        self.assertEqual(caught.exception.code, "non_finite")
