"""
Tests for the learning-rate schedule, augmentation and the training loop.
"""
import attrs
import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import ArgumentError, CompatibilityError, ResourceError
from apps.dsx.angle import AngleQuery
from apps.dsx.inference import forward_offline
from apps.dsx.testing import TINY, MemoryManifest, memory_record, tiny_checkpoint
from apps.dsx.training import TrainConfig, augment, learning_rate, train
from apps.evaluation.metrics import si_sdr
from apps.features.normalization import NormStats


class LearningRateTests(SimpleTestCase):

    def test_schedule(self):
        config = TrainConfig()
        self.assertAlmostEqual(learning_rate(0, config), 5e-4)
        self.assertAlmostEqual(learning_rate(5, config), 2.75e-3)
        self.assertAlmostEqual(learning_rate(10, config), 5e-3)
        self.assertAlmostEqual(learning_rate(30, config), 5e-3)
        self.assertAlmostEqual(learning_rate(31, config), 5e-3)
        self.assertAlmostEqual(learning_rate(32, config), 5e-3 * 0.95)
        self.assertAlmostEqual(learning_rate(35, config), 5e-3 * 0.95 ** 2)

    def test_no_warmup(self):
        self.assertEqual(learning_rate(0, TrainConfig(warmup_epochs=0)), 5e-3)

    def test_invalid_config(self):
        with self.assertRaises(ArgumentError):
            TrainConfig(batch_size=0)
        with self.assertRaises(ArgumentError):
            TrainConfig(augment_probability=1.5)


class AugmentTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(0)
        self.mixture = rng.standard_normal((2, 1000))
        self.target = rng.standard_normal(1000)

    def test_disabled(self):
        config = TrainConfig(augment_probability=0.0)
        mixture, target = augment(np.random.default_rng(1), self.mixture, self.target, config)
        np.testing.assert_array_equal(mixture, self.mixture)
        np.testing.assert_array_equal(target, self.target)

    def test_always_on_keeps_pairing(self):
        config = TrainConfig(augment_probability=1.0)
        mixture, target = augment(np.random.default_rng(1), self.mixture, self.target, config)
        gain = np.linalg.norm(target) / np.linalg.norm(self.target)
        self.assertLessEqual(abs(20 * np.log10(gain)), 3.0)
        shift = int(np.argmax([np.dot(np.roll(self.target, s), target) for s in range(1000)]))
        np.testing.assert_allclose(np.roll(self.mixture, shift, axis=-1) * gain, mixture, atol=1e-12)
        np.testing.assert_allclose(np.roll(self.target, shift) * gain, target, atol=1e-12)


class TrainTests(SimpleTestCase):

    def setUp(self):
        self.stats = NormStats.neutral(TINY.bins)
        self.manifest = MemoryManifest([
            memory_record(i, selected=1 << (i % 6), target_present=i != 3) for i in range(4)
        ])
        self.config = TrainConfig(epochs=2, batch_size=2, max_steps=3)

    def test_same_seed_same_checkpoint(self):
        first = train(self.manifest, self.stats, TINY, self.config, seed=5)
        second = train(self.manifest, self.stats, TINY, self.config, seed=5)
        self.assertEqual(first.to_bytes(), second.to_bytes())
        third = train(self.manifest, self.stats, TINY, self.config, seed=6)
        self.assertNotEqual(first.to_bytes(), third.to_bytes())

    def test_metadata(self):
        checkpoint = train(self.manifest, self.stats, TINY, self.config, seed=0, valid_manifest=self.manifest)
        metadata = checkpoint.metadata
        self.assertEqual(metadata['steps'], 3)
        self.assertEqual(metadata['epochs'], 2)
        self.assertEqual(len(metadata['history']), 2)
        self.assertIn('valid_loss', metadata['history'][0])
        self.assertIn(metadata['best_epoch'], (0, 1))
        self.assertEqual(metadata['records'], 4)

    def test_loss_falls_on_a_single_mixture(self):
        manifest = MemoryManifest([memory_record(0, length=240)])
        config = TrainConfig(epochs=60, batch_size=1, warmup_epochs=0, hold_epochs=60, augment_probability=0.0)
        history = train(manifest, self.stats, TINY, config, seed=1).metadata['history']
        losses = [entry['train_loss'] for entry in history]
        self.assertLess(min(losses[-10:]), losses[0])

    def test_few_records_train_with_a_warning(self):
        with self.assertLogs('apps.dsx.training', level='WARNING') as logs:
            checkpoint = train(self.manifest, self.stats, TINY, self.config, seed=0)
        self.assertIn('only 4 records', logs.output[0])
        self.assertEqual(checkpoint.metadata['records'], 4)

    def test_empty_manifest(self):
        with self.assertRaises(ResourceError):
            train(MemoryManifest([]), self.stats, TINY, self.config, seed=0)

    def test_sector_count_mismatch(self):
        manifest = MemoryManifest([memory_record(0, n_sectors=9)])
        with self.assertRaises(CompatibilityError):
            train(manifest, self.stats, TINY, self.config, seed=0)

    def test_stats_for_another_frame(self):
        with self.assertRaises(CompatibilityError):
            train(self.manifest, NormStats.neutral(145), TINY, self.config, seed=0)

    def test_silent_weight_is_recorded(self):
        config = attrs.evolve(self.config, silent_weight=10.0)
        checkpoint = train(self.manifest, self.stats, TINY, config, seed=0)
        self.assertEqual(checkpoint.metadata['train_config']['silent_weight'], 10.0)


class SingleMixtureFitTests(SimpleTestCase):
    """
    A small network trained for 300 steps on one mixture, keeping the
    best-loss weights.
    """

    STEPS = 300
    CONFIG = attrs.evolve(TINY, embed_channels=4)

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.record = memory_record(0, length=240, interferer_gain=0.005)
        cls.stats = NormStats.neutral(cls.CONFIG.bins)
        manifest = MemoryManifest([cls.record])
        config = TrainConfig(
            epochs=cls.STEPS, batch_size=1, lr_peak=1e-2, warmup_epochs=0, hold_epochs=cls.STEPS,
            augment_probability=0.0, max_steps=cls.STEPS,
        )
        cls.checkpoint = train(manifest, cls.stats, cls.CONFIG, config, seed=3, valid_manifest=manifest)
        cls.query = AngleQuery(n_sectors=6, selected=cls.record['selected_sectors'])

    def output_si_sdr(self, checkpoint):
        estimate = forward_offline(self.record['mixture'], self.query, checkpoint)
        return si_sdr(estimate, self.record['target'])

    def test_reaches_ten_db_on_the_training_mixture(self):
        self.assertEqual(self.checkpoint.metadata['steps'], self.STEPS)
        initial = self.output_si_sdr(tiny_checkpoint(seed=3, config=self.CONFIG, stats=self.stats))
        trained = self.output_si_sdr(self.checkpoint)
        self.assertGreaterEqual(trained, 10.0)
        self.assertGreaterEqual(trained - initial, 10.0)

    def test_other_sectors_give_other_outputs(self):
        mixture = self.record['mixture']
        own = forward_offline(mixture, self.query, self.checkpoint)
        np.testing.assert_array_equal(own, forward_offline(mixture, self.query, self.checkpoint))
        for sectors in ([4], [6], [1, 2]):
            other = forward_offline(mixture, AngleQuery.of(sectors, 6), self.checkpoint)
            self.assertGreater(np.linalg.norm(own - other) / np.linalg.norm(own), 1e-3)
