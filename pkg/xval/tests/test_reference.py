"""Tests for the transcribed reference samplers and the exact layer law."""

import math

import numpy as np
import pytest

from xval.compare import (
    exact_chisquare,
    exact_layer_pmf,
    free_coupling_count,
    layer_key_from_reference,
    layer_weight_total,
    tableau_key_from_reference,
)
from xval.reference import (
    _gf2_inv,
    corrected_sample_qmallows,
    is_symplectic,
    reference_random_clifford,
    reference_sample_qmallows,
)


def within_5_sigma(observed, draws, p):
    return abs(observed - draws * p) <= 5.0 * math.sqrt(draws * p * (1.0 - p))


class FakeRng:
    """Scripted stand-in for a RandomState, for deterministic draws."""

    def __init__(self, uniforms=(), randints=()):
        self.uniforms = list(uniforms)
        self.randints = list(randints)

    def uniform(self, low, high):
        return self.uniforms.pop(0)

    def randint(self, bound):
        return self.randints.pop(0)


class TestVerbatimLayerSampler:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_output_is_the_same_for_every_seed(self, n):
        outcomes = {
            (tuple(h), tuple(s))
            for h, s in (reference_sample_qmallows(n, seed) for seed in range(100))
        }
        assert len(outcomes) == 1

    def test_constant_outcome_is_the_predicted_one(self):
        h, s = reference_sample_qmallows(4, 0)
        assert list(h) == [1, 1, 1, 0]
        assert list(s) == [1, 2, 3, 0]
        h1, s1 = reference_sample_qmallows(1, 0)
        assert list(h1) == [0] and list(s1) == [0]


class TestCorrectedLayerSampler:
    def test_reproducible_and_seed_sensitive(self):
        a = corrected_sample_qmallows(3, 42)
        b = corrected_sample_qmallows(3, 42)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        outcomes = {
            (tuple(h), tuple(s))
            for h, s in (corrected_sample_qmallows(3, seed) for seed in range(40))
        }
        assert len(outcomes) > 1

    def test_single_qubit_split(self):
        rng = np.random.RandomState(7)
        draws = 30000
        ones = sum(int(corrected_sample_qmallows(1, rng)[0][0]) for _ in range(draws))
        assert within_5_sigma(ones, draws, 2 / 3)
        assert within_5_sigma(draws - ones, draws, 1 / 3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_exact_law(self, n):
        pmf = exact_layer_pmf(n)
        rng = np.random.RandomState(n)
        draws = 20000
        counts = {}
        for _ in range(draws):
            key = layer_key_from_reference(*corrected_sample_qmallows(n, rng))
            counts[key] = counts.get(key, 0) + 1
        assert set(counts) <= set(pmf)
        for key, prob in pmf.items():
            assert within_5_sigma(counts.get(key, 0), draws, float(prob))
        _, _, p_value = exact_chisquare(counts, pmf)
        assert p_value > 1e-3

    def test_scripted_two_qubit_draw(self):
        h, s = corrected_sample_qmallows(2, FakeRng(uniforms=[0.05, 0.2]))
        assert list(h) == [0, 0]
        assert list(s) == [0, 1]


class TestExactLayerLaw:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_normalization(self, n):
        pmf = exact_layer_pmf(n)
        assert sum(pmf.values()) == 1
        assert len(pmf) == 2**n * math.factorial(n)
        for prob in pmf.values():
            assert layer_weight_total(n) % prob.denominator == 0

    def test_weight_totals(self):
        import itertools

        for n in range(1, 6):
            total = sum(
                1 << free_coupling_count(h, images)
                for h in itertools.product((0, 1), repeat=n)
                for images in itertools.permutations(range(n))
            )
            assert total == layer_weight_total(n)

    def test_single_qubit_values(self):
        pmf = exact_layer_pmf(1)
        assert float(pmf[("0", (1,))]) == pytest.approx(1 / 3)
        assert float(pmf[("1", (1,))]) == pytest.approx(2 / 3)


class TestGf2Inverse:
    def test_round_trip_on_triangular_matrices(self):
        rng = np.random.RandomState(5)
        for _ in range(50):
            n = rng.randint(5) + 1
            mat = (np.tril(rng.randint(0, 2, (n, n)), -1) + np.identity(n, dtype=int)) % 2
            for candidate in (mat, mat.T):
                inv = _gf2_inv(candidate)
                assert np.array_equal(candidate @ inv % 2, np.identity(n, dtype=int))


class TestReferenceCliffordSampler:
    def test_reproducible(self):
        assert np.array_equal(
            reference_random_clifford(3, 42), reference_random_clifford(3, 42)
        )

    def test_single_qubit_classes_uniform(self):
        rng = np.random.RandomState(11)
        draws = 12000
        counts = {}
        for _ in range(draws):
            key = tableau_key_from_reference(reference_random_clifford(1, rng))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 6
        for count in counts.values():
            assert within_5_sigma(count, draws, 1 / 6)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_output_is_symplectic(self, n):
        rng = np.random.RandomState(n)
        for _ in range(100):
            assert is_symplectic(reference_random_clifford(n, rng))

    def test_verbatim_layer_variant_is_supported(self):
        rng = np.random.RandomState(3)
        mats = {
            reference_random_clifford(
                2, rng, layer_sampler=reference_sample_qmallows
            ).tobytes()
            for _ in range(200)
        }
        assert len(mats) > 1  # couplings still vary around the frozen layer

    def test_scripted_draw_matches_hand_computed_key(self):
        rng = FakeRng(uniforms=[0.05, 0.2], randints=[1, 0, 1, 1])
        mat = reference_random_clifford(2, rng)
        assert tableau_key_from_reference(mat) == ("XY", "ZX", "ZI", "ZZ")
