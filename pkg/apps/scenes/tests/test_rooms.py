"""
Tests for rooms, the image-source method and receiver rigs.
"""
import itertools
import math

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import ArgumentError
from apps.scenes.rooms import ReceiverRig, RigTemplate, RoomSpec, image_sources, lattice, render_rir

ROOM = RoomSpec(dims=(6.0, 5.0, 3.0), absorption=0.4, max_order=3, room_id='r1')


class RoomSpecTests(SimpleTestCase):

    def test_ranges(self):
        with self.assertRaises(ArgumentError):
            RoomSpec(dims=(1.5, 4, 3), absorption=0.5)
        with self.assertRaises(ArgumentError):
            RoomSpec(dims=(4, 4, 3), absorption=0.0)
        with self.assertRaises(ArgumentError):
            RoomSpec(dims=(4, 4, 3), absorption=0.5, max_order=7)

    def test_reflection_coefficient(self):
        self.assertAlmostEqual(ROOM.reflection, math.sqrt(0.6))


class ImageSourceTests(SimpleTestCase):

    def test_counts_by_order(self):
        for order, expected in ((0, 1), (1, 7), (2, 25)):
            with self.subTest(order=order):
                self.assertEqual(len(image_sources(ROOM, (1, 1, 1), order)), expected)

    def test_lattice_matches_brute_force(self):
        for order in range(5):
            span = range(-order, order + 1)
            brute = [p for p in itertools.product(span, span, span) if sum(map(abs, p)) <= order]
            self.assertEqual(len(lattice(order)), len(brute))

    def test_direct_path_and_first_reflections(self):
        images = image_sources(ROOM, (1.0, 2.0, 1.5), 1)
        position, gain = images[0]
        np.testing.assert_array_equal(position, [1.0, 2.0, 1.5])
        self.assertEqual(gain, 1.0)
        mirrored = sorted(tuple(p) for p, _ in images[1:])
        self.assertIn((-1.0, 2.0, 1.5), mirrored)
        self.assertIn((11.0, 2.0, 1.5), mirrored)
        self.assertIn((1.0, 2.0, -1.5), mirrored)
        for _, g in images[1:]:
            self.assertAlmostEqual(g, ROOM.reflection)

    def test_source_outside_room(self):
        with self.assertRaises(ArgumentError):
            image_sources(ROOM, (7.0, 1.0, 1.0))
        with self.assertRaises(ArgumentError):
            image_sources(ROOM, (0.0, 1.0, 1.0))


class RenderRirTests(SimpleTestCase):

    def setUp(self):
        self.free = RoomSpec(dims=(12.0, 10.0, 10.0), absorption=1.0, max_order=0)

    def test_free_field_delay_and_amplitude(self):
        rir = render_rir(self.free, (2.0, 5.0, 5.0), (5.43, 5.0, 5.0))
        self.assertEqual(int(np.argmax(np.abs(rir))), 240)
        self.assertAlmostEqual(rir[240], 1 / (4 * math.pi * 3.43), places=12)
        self.assertEqual(np.count_nonzero(rir), 1)

    def test_doubling_distance_halves_amplitude(self):
        near = render_rir(self.free, (2.0, 5.0, 5.0), (5.43, 5.0, 5.0))
        far = render_rir(self.free, (2.0, 5.0, 5.0), (8.86, 5.0, 5.0))
        self.assertAlmostEqual(20 * math.log10(far[480] / near[240]), -6.0206, places=3)

    def test_reflections_add_energy(self):
        src, mic = (1.3, 2.2, 1.1), (4.1, 3.3, 1.7)
        order0 = render_rir(ROOM, src, mic, 0)
        order1 = render_rir(ROOM, src, mic, 1)
        self.assertGreater(np.sum(order1 ** 2), np.sum(order0 ** 2))

    def test_more_absorption_never_adds_energy(self):
        src, mic = (1.3, 2.2, 1.1), (4.1, 3.3, 1.7)
        energies = [
            np.sum(render_rir(RoomSpec(ROOM.dims, alpha, 3), src, mic) ** 2)
            for alpha in (0.1, 0.3, 0.6, 0.9, 1.0)
        ]
        self.assertTrue(all(a >= b for a, b in zip(energies, energies[1:])))

    def test_length_covers_longest_path(self):
        rir = render_rir(ROOM, (1.0, 1.0, 1.0), (5.0, 4.0, 2.0))
        self.assertGreater(len(rir), 15)
        self.assertNotEqual(rir[-16], 0.0)


class ReceiverRigTests(SimpleTestCase):

    def test_separation_limit(self):
        with self.assertRaises(ArgumentError):
            ReceiverRig(ref_mic_pos=(1, 1, 1), struct_mic_pos=(1.05, 1, 1))
        rig = ReceiverRig(ref_mic_pos=(1.01, 1, 1), struct_mic_pos=(1, 1, 1))
        self.assertAlmostEqual(rig.separation, 0.01)

    def test_device_azimuth_follows_orientation(self):
        rig = ReceiverRig(ref_mic_pos=(2, 2, 1), struct_mic_pos=(2, 2, 1), orientation_deg=90.0)
        self.assertAlmostEqual(rig.device_azimuth((2.0, 3.0, 1.0)), 0.0)
        self.assertAlmostEqual(rig.device_azimuth((1.0, 2.0, 1.0)), 90.0)
        self.assertAlmostEqual(rig.device_azimuth((3.0, 2.0, 1.0)), 270.0)

    def test_world_point_round_trip(self):
        rig = ReceiverRig(ref_mic_pos=(2, 2, 1), struct_mic_pos=(2, 2, 1), orientation_deg=30.0)
        point = rig.world_point(75.0, 1.5)
        self.assertAlmostEqual(rig.device_azimuth(point), 75.0)
        self.assertAlmostEqual(math.dist(point, rig.struct_mic_pos), 1.5)

    def test_template_places_array_around_struct_mic(self):
        rig = RigTemplate(array_count=4, array_radius=0.05).place(ROOM)
        self.assertEqual(rig.struct_mic_pos, (3.0, 2.5, 1.2))
        self.assertEqual(len(rig.array_positions), 4)
        for x, y, z in rig.array_geometry():
            self.assertAlmostEqual(math.hypot(x, y), 0.05)
        first = rig.array_geometry()[0]
        self.assertAlmostEqual(first[0], 0.05)
        self.assertAlmostEqual(first[1], 0.0)

    def test_template_must_fit(self):
        with self.assertRaises(ArgumentError):
            RigTemplate(height=5.0).place(ROOM)
