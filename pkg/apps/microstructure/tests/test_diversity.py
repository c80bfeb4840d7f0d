"""
Tests for spatial diversity, distance maps and design sweeps.
"""
import attrs
import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import ArgumentError
from apps.microstructure.diversity import (
    band_bins,
    design_sweep,
    pairwise_distance_map,
    spatial_diversity,
)
from apps.microstructure.response import DirectionFilterBank, realize_bank
from apps.microstructure.specs import default_spec, flat_spec, with_diameter

BAND = np.linspace(1000, 4000, 31)


def impulse_bank(gains, taps=64):
    filters = np.zeros((len(gains), taps))
    filters[:, 0] = gains
    return DirectionFilterBank(spec=flat_spec(), angle_grid=range(len(gains)), taps=taps, filters=filters)


class SpatialDiversityTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.default_bank = realize_bank(default_spec())
        cls.flat_bank = realize_bank(flat_spec())

    def test_identical_filters_have_zero_diversity(self):
        self.assertTrue(np.all(spatial_diversity(self.flat_bank, BAND) == 0.0))

    def test_two_point_distribution(self):
        bank = impulse_bank([0.0, 0.0, 2.0, 2.0])
        np.testing.assert_allclose(spatial_diversity(bank, BAND), 1.0, atol=1e-12)

    def test_default_design_beats_flat_bank(self):
        freqs = band_bins(256, 1000, 4000)
        default = spatial_diversity(self.default_bank, freqs)
        flat = spatial_diversity(self.flat_bank, freqs)
        self.assertGreaterEqual(np.mean(default > flat), 0.9)

    def test_permutation_invariance(self):
        order = np.random.default_rng(0).permutation(len(self.default_bank))
        shuffled = attrs.evolve(
            self.default_bank,
            angle_grid=[self.default_bank.angle_grid[i] for i in order],
            filters=self.default_bank.filters[order],
        )
        np.testing.assert_allclose(
            spatial_diversity(shuffled, BAND), spatial_diversity(self.default_bank, BAND), rtol=1e-9
        )

    def test_homogeneity(self):
        scaled = attrs.evolve(self.default_bank, filters=3.0 * self.default_bank.filters)
        np.testing.assert_allclose(
            spatial_diversity(scaled, BAND), 9.0 * spatial_diversity(self.default_bank, BAND), rtol=1e-9
        )
        np.testing.assert_allclose(
            pairwise_distance_map(scaled, 1000, 4000),
            3.0 * pairwise_distance_map(self.default_bank, 1000, 4000),
            rtol=1e-9, atol=1e-12,
        )


class DistanceMapTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.bank = realize_bank(default_spec(), list(range(0, 181, 10)))

    def test_zero_diagonal_and_symmetry(self):
        distances = pairwise_distance_map(self.bank, 1000, 4000)
        np.testing.assert_array_equal(np.diag(distances), 0.0)
        np.testing.assert_array_equal(distances, distances.T)
        self.assertTrue(np.all(distances[~np.eye(len(distances), dtype=bool)] > 0))

    def test_flat_bank_is_indistinguishable(self):
        distances = pairwise_distance_map(realize_bank(flat_spec(), [0.0, 45.0, 90.0]), 1000, 4000)
        np.testing.assert_array_equal(distances, 0.0)

    def test_band_must_be_ordered(self):
        with self.assertRaises(ArgumentError):
            pairwise_distance_map(self.bank, 4000, 1000)
        with self.assertRaises(ArgumentError):
            pairwise_distance_map(self.bank, 1000, 20000)


class DesignSweepTests(SimpleTestCase):

    def test_default_ranks_above_flat(self):
        ranked = design_sweep([flat_spec(), default_spec()])
        self.assertEqual([s.name for s in ranked], ['default', 'flat'])
        self.assertEqual(ranked[1].mean_diversity, 0.0)
        self.assertEqual([s.rank for s in ranked], [1, 2])

    def test_twenty_mm_beats_ten_mm_and_flat(self):
        ranked = design_sweep([with_diameter(default_spec(), 0.010), flat_spec(), default_spec()])
        self.assertEqual(ranked[0].name, 'default')
        self.assertEqual(ranked[-1].name, 'flat')

    def test_duplicates_tie_in_input_order(self):
        first = attrs.evolve(default_spec(), name='a')
        second = attrs.evolve(default_spec(), name='b')
        ranked = design_sweep([first, second], angle_grid=list(range(0, 181, 20)))
        self.assertEqual([s.name for s in ranked], ['a', 'b'])
        self.assertEqual(ranked[0].mean_diversity, ranked[1].mean_diversity)

    def test_empty_sweep(self):
        with self.assertRaises(ArgumentError):
            design_sweep([])

    def test_single_spec_is_rejected(self):
        with self.assertRaises(ArgumentError):
            design_sweep([default_spec()])
