"""
Tests for array geometry and steering vectors.
"""
import numpy as np
from django.test import SimpleTestCase

from apps.baselines.steering import ArrayGeometry, steering_vector
from apps.common.exceptions import ArgumentError

PAIR = ArrayGeometry([[-0.05, 0.0, 0.0], [0.05, 0.0, 0.0]])


class SteeringVectorTests(SimpleTestCase):

    def test_zero_frequency(self):
        np.testing.assert_array_equal(steering_vector(ArrayGeometry.circular(6), 40.0, 0.0), np.ones(6))

    def test_broadside_pair(self):
        np.testing.assert_allclose(steering_vector(PAIR, 90.0, 3000.0), [1.0, 1.0], atol=1e-12)

    def test_endfire_half_wavelength(self):
        a = steering_vector(PAIR, 0.0, 1715.0)
        difference = np.angle(a[0] * np.conj(a[1]))
        self.assertAlmostEqual(abs(difference), np.pi, places=9)

    def test_pure_phase(self):
        a = steering_vector(ArrayGeometry.circular(5, 0.04), 73.0, np.linspace(0.0, 12000.0, 40))
        self.assertEqual(a.shape, (40, 5))
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)

    def test_nearer_mic_hears_first(self):
        delays = PAIR.delays(0.0)
        self.assertLess(delays[1], 0.0)
        self.assertAlmostEqual(delays[1], -delays[0])

    def test_frequency_above_nyquist(self):
        with self.assertRaises(ArgumentError):
            steering_vector(PAIR, 0.0, 13000.0)


class ArrayGeometryTests(SimpleTestCase):

    def test_circular(self):
        geometry = ArrayGeometry.circular(4, 0.05)
        np.testing.assert_allclose(geometry.centroid, 0.0, atol=1e-15)
        self.assertAlmostEqual(geometry.aperture, 0.1)
        self.assertEqual(geometry.subset(2).count, 2)

    def test_too_many_mics(self):
        with self.assertRaises(ArgumentError):
            ArrayGeometry.circular(7, 0.05)

    def test_aperture_limit(self):
        with self.assertRaises(ArgumentError):
            ArrayGeometry([[0.0, 0.0, 0.0], [0.25, 0.0, 0.0]])

    def test_duplicate_positions(self):
        with self.assertRaises(ArgumentError):
            ArrayGeometry([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    def test_bad_shape(self):
        with self.assertRaises(ArgumentError):
            ArrayGeometry([[0.0, 0.0], [0.1, 0.0]])
