"""
Tests for the checkpoint file format.
"""
import struct
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import CompatibilityError
from apps.dsx.angle import AngleQuery
from apps.dsx.checkpoint import MAGIC, Checkpoint, load_checkpoint, save_checkpoint
from apps.dsx.inference import forward_offline
from apps.dsx.testing import tiny_checkpoint
from apps.features.normalization import NormStats


class CheckpointTests(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        rng = np.random.default_rng(0)
        stats = NormStats(mean=rng.standard_normal((3, 9)).astype(np.float32),
                          var=(rng.random((3, 9)) + 0.1).astype(np.float32), count=42)
        self.checkpoint = tiny_checkpoint(seed=6, stats=stats)

    def tearDown(self):
        self._tmp.cleanup()

    def test_save_load_save_is_byte_identical(self):
        first = save_checkpoint(self.checkpoint, self.tmp / 'a.ssdx')
        second = save_checkpoint(load_checkpoint(first), self.tmp / 'b.ssdx')
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_layout(self):
        raw = self.checkpoint.to_bytes()
        self.assertEqual(raw[:4], MAGIC)
        self.assertEqual(struct.unpack('<I', raw[4:8])[0], 1)

    def test_loaded_checkpoint_reproduces_output(self):
        loaded = Checkpoint.from_bytes(self.checkpoint.to_bytes())
        audio = np.random.default_rng(1).standard_normal((2, 100))
        query = AngleQuery.of([4], 6)
        np.testing.assert_array_equal(
            forward_offline(audio, query, loaded), forward_offline(audio, query, self.checkpoint))
        self.assertEqual(loaded.stats.count, 42)
        self.assertEqual(loaded.config, self.checkpoint.config)
        self.assertEqual(loaded.metadata, {'seed': 6})

    def test_tensor_names_are_sorted(self):
        names = list(self.checkpoint.tensors)
        self.assertEqual(names, sorted(names))
        self.assertIn('blocks.0.down.weight', names)
        self.assertTrue(all(t.dtype == np.dtype('<f4') for t in self.checkpoint.tensors.values()))

    def test_corrupted_length_field(self):
        raw = bytearray(self.checkpoint.to_bytes())
        raw[8:12] = struct.pack('<I', 10 ** 7)
        with self.assertRaises(CompatibilityError):
            Checkpoint.from_bytes(bytes(raw))

    def test_truncated_file(self):
        raw = self.checkpoint.to_bytes()
        with self.assertRaises(CompatibilityError):
            Checkpoint.from_bytes(raw[:-3])

    def test_trailing_bytes(self):
        with self.assertRaises(CompatibilityError):
            Checkpoint.from_bytes(self.checkpoint.to_bytes() + b'\0')

    def test_bad_magic_and_version(self):
        raw = self.checkpoint.to_bytes()
        with self.assertRaises(CompatibilityError):
            Checkpoint.from_bytes(b'XXXX' + raw[4:])
        with self.assertRaises(CompatibilityError):
            Checkpoint.from_bytes(raw[:4] + struct.pack('<I', 2) + raw[8:])

    def test_sector_count_mismatch(self):
        path = save_checkpoint(self.checkpoint, self.tmp / 'model.ssdx')
        with self.assertRaises(CompatibilityError):
            load_checkpoint(path, n_sectors=9)
        self.assertEqual(load_checkpoint(path, n_sectors=6).config.n_sectors, 6)

    def test_missing_tensor(self):
        tensors = dict(self.checkpoint.tensors)
        tensors.pop('decoder.weight')
        broken = Checkpoint(config=self.checkpoint.config, stats=self.checkpoint.stats, tensors=tensors)
        with self.assertRaises(CompatibilityError):
            Checkpoint.from_bytes(broken.to_bytes()).model
