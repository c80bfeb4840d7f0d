"""
Tests for sector indexing and selection masks.
"""
from django.test import SimpleTestCase

from apps.common.exceptions import ArgumentError
from apps.scenes.sectors import mask_from_sectors, sector_bounds, sector_center, sector_of, sectors_from_mask


class SectorTests(SimpleTestCase):

    def test_sector_of(self):
        self.assertEqual(sector_of(15.0, 6), 1)
        self.assertEqual(sector_of(30.0, 6), 2)
        self.assertEqual(sector_of(179.9, 9), 9)
        self.assertEqual(sector_of(0.0, 9), 1)

    def test_unfolded_angle_is_rejected(self):
        with self.assertRaises(ArgumentError):
            sector_of(180.0, 6)
        with self.assertRaises(ArgumentError):
            sector_of(-1.0, 6)

    def test_only_six_or_nine_sectors(self):
        with self.assertRaises(ArgumentError):
            sector_of(10.0, 4)

    def test_bounds_and_centres(self):
        self.assertEqual(sector_bounds(2, 6), (30.0, 60.0))
        self.assertEqual(sector_center(1, 6), 15.0)
        self.assertEqual(sector_center(6, 6), 165.0)
        self.assertEqual(sector_center(9, 9), 170.0)

    def test_masks(self):
        self.assertEqual(mask_from_sectors([1, 6]), 0b100001)
        self.assertEqual(sectors_from_mask(0b100001, 6), [1, 6])
        with self.assertRaises(ArgumentError):
            sectors_from_mask(0, 6)
        with self.assertRaises(ArgumentError):
            sectors_from_mask(1 << 6, 6)
