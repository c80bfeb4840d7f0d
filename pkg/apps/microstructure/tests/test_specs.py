"""
Tests for microstructure specs, presets and their JSON documents.
"""
import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from apps.common.exceptions import ArgumentError, FormatError
from apps.microstructure.specs import (
    HoleSpec,
    MicrostructureSpec,
    Resonator,
    default_spec,
    flat_spec,
    load_spec,
    preset,
    save_spec,
    spec_from_document,
    spec_to_document,
    ten_hole_spec,
    with_diameter,
)


class SpecValidationTests(SimpleTestCase):

    def test_diameter_range(self):
        with self.assertRaises(ArgumentError):
            MicrostructureSpec(diameter=0.001)
        with self.assertRaises(ArgumentError):
            MicrostructureSpec(diameter=0.08)

    def test_duplicate_azimuths(self):
        with self.assertRaises(ArgumentError):
            MicrostructureSpec(diameter=0.02, holes=[HoleSpec(10.0), HoleSpec(10.0)])

    def test_too_many_holes(self):
        holes = [HoleSpec(float(a)) for a in range(0, 170, 10)]
        with self.assertRaises(ArgumentError):
            MicrostructureSpec(diameter=0.02, holes=holes)

    def test_hole_ranges(self):
        with self.assertRaises(ArgumentError):
            HoleSpec(360.0)
        with self.assertRaises(ArgumentError):
            HoleSpec(10.0, tube_length=0.2)
        with self.assertRaises(ArgumentError):
            Resonator(f0=12000.0, q=1.0)
        with self.assertRaises(ArgumentError):
            Resonator(f0=1000.0, q=0.0)

    def test_leakage_amplitude(self):
        self.assertAlmostEqual(flat_spec().leakage, 10 ** (-33 / 20))
        self.assertEqual(MicrostructureSpec(diameter=0.02, wall_leakage_db=-math.inf).leakage, 0.0)


class PresetTests(SimpleTestCase):

    def test_default_design(self):
        spec = default_spec()
        self.assertEqual(spec.diameter, 0.020)
        self.assertEqual([h.azimuth_deg for h in spec.holes], [10, 35, 60, 100, 140, 170])
        self.assertEqual([h.resonator.f0 for h in spec.holes], [1400, 2000, 2700, 3400, 4300, 5200])

    def test_ten_hole_adds_ports_between_60_and_180(self):
        spec = ten_hole_spec()
        self.assertEqual(len(spec.holes), 10)
        extra = set(h.azimuth_deg for h in spec.holes) - set(h.azimuth_deg for h in default_spec().holes)
        self.assertTrue(all(60 <= a <= 180 for a in extra))

    def test_with_diameter_renames(self):
        spec = with_diameter(default_spec(), 0.010)
        self.assertEqual(spec.diameter, 0.010)
        self.assertEqual(spec.name, 'default_10mm')

    def test_unknown_preset(self):
        with self.assertRaises(ArgumentError):
            preset('twelve_hole')


class SpecDocumentTests(SimpleTestCase):

    def test_document_round_trip(self):
        spec = default_spec()
        self.assertEqual(spec_from_document(spec_to_document(spec)), spec)

    def test_null_leakage_is_ideal_wall(self):
        spec = spec_from_document({'diameter': 0.02, 'holes': [], 'wall_leakage_db': None})
        self.assertEqual(spec.leakage, 0.0)
        self.assertIsNone(spec_to_document(spec)['wall_leakage_db'])

    def test_schema_violation_names_the_field(self):
        with self.assertRaisesMessage(FormatError, 'holes.0'):
            spec_from_document({'diameter': 0.02, 'holes': [{'tube_length': 0.01}]})

    def test_file_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'spec.json'
            save_spec(ten_hole_spec(), path)
            self.assertEqual(load_spec(path), ten_hole_spec())
