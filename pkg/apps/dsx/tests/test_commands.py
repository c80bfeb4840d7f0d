"""
Tests for the train, infer and stream management commands.
"""
import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from apps.common.files import read_json, write_json
from apps.dsx.checkpoint import load_checkpoint, save_checkpoint
from apps.dsx.config import NetConfig
from apps.dsx.testing import tiny_checkpoint
from apps.experiments.models import ExperimentRun
from apps.features.normalization import fit_norm_stats
from apps.scenes.mixtures import read_manifest
from apps.scenes.testing import small_dataset
from apps.signal_core.audio import AudioBuffer, wav_read, wav_write
from apps.signal_core.framing import FrameSpec

NET = {
    'chunk_samples': 32, 'window_len': 64, 'embed_channels': 3, 'n_blocks': 1,
    'freq_downsample': 4, 'blstm_hidden': 3, 'causal_lstm_hidden': 3, 'angle_hidden': 4,
}


class CommandTestCase(TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_command(self, name, document, **options):
        config = self.tmp / f'{name}.json'
        config.write_text(json.dumps(document))
        out = self.tmp / name
        call_command(name, str(config), out=str(out), stdout=StringIO(), **options)
        return out


class TrainCommandTests(CommandTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls._data = tempfile.TemporaryDirectory()
        cls.manifest = small_dataset(cls._data.name, with_array=False, clip_seconds=1.0)
        stats = fit_norm_stats(read_manifest(cls.manifest), FrameSpec(64, 32), max_records=4)
        cls.stats = write_json(Path(cls._data.name) / 'norm_stats.json',
                               {'window_len': 64, 'hop': 32, **stats.as_dict()})

    @classmethod
    def tearDownClass(cls):
        cls._data.cleanup()
        super().tearDownClass()

    def document(self, **overrides):
        document = {
            'manifest': str(self.manifest),
            'norm_stats': str(self.stats),
            'net': NET,
            'training': {'epochs': 1, 'batch_size': 1, 'max_steps': 1},
        }
        document.update(overrides)
        return document

    def test_trains_and_writes_checkpoint(self):
        out = self.run_command('train', self.document(seed=4))

        checkpoint = load_checkpoint(out / 'model.ssdx')
        self.assertEqual(checkpoint.config.window_len, 64)
        self.assertEqual(checkpoint.config.lookahead_samples, 32)
        self.assertEqual(checkpoint.metadata['steps'], 1)
        self.assertEqual(checkpoint.metadata['seed'], 4)
        lines = (out / 'training_history.csv').read_text().splitlines()
        self.assertEqual(lines[0], 'epoch,lr,train_loss,valid_loss')
        self.assertEqual(len(lines), 2)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, 'Completed')
        self.assertEqual(run.summary['checkpoint'], 'model.ssdx')

    def test_stats_for_another_frame(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('train', self.document(net={**NET, 'window_len': 96}))
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('norm_stats', str(ctx.exception))

    def test_sector_override_mismatch_fails_the_run(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('train', self.document(), n_sectors=9)
        self.assertNotEqual(ctx.exception.returncode, 2)
        self.assertEqual(ExperimentRun.objects.get().status, 'Failed')


class InferenceCommandTests(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.checkpoint = save_checkpoint(tiny_checkpoint(seed=2), self.tmp / 'model.ssdx')
        rng = np.random.default_rng(0)
        self.audio = rng.standard_normal((2, 12000)) * 0.1
        self.wav = wav_write(AudioBuffer(self.audio), self.tmp / 'input.wav')

    def test_infer_single_file(self):
        out = self.run_command('infer', {'checkpoint': str(self.checkpoint), 'input': str(self.wav),
                                         'sectors': [2, 1]})
        estimate = wav_read(out / 'estimate.wav')
        self.assertEqual(estimate.length, self.audio.shape[1])
        self.assertEqual(ExperimentRun.objects.get().summary['sectors'], [1, 2])

    def test_infer_needs_sectors(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('infer', {'checkpoint': str(self.checkpoint), 'input': str(self.wav)})
        self.assertEqual(ctx.exception.returncode, 2)

    def test_infer_with_other_sector_count(self):
        with self.assertRaises(CommandError):
            self.run_command('infer', {'checkpoint': str(self.checkpoint), 'input': str(self.wav),
                                       'sectors': [1]}, n_sectors=9)

    def test_stream_five_seconds_of_default_chunks(self):
        checkpoint = save_checkpoint(tiny_checkpoint(seed=0, config=NetConfig()), self.tmp / 'default.ssdx')
        audio = np.random.default_rng(1).standard_normal((2, 5 * 24000)) * 0.1
        wav = wav_write(AudioBuffer(audio), self.tmp / 'five_seconds.wav')
        out = self.run_command('stream', {'checkpoint': str(checkpoint), 'input': str(wav), 'sectors': [1]})

        summary = ExperimentRun.objects.get().summary
        self.assertEqual(summary['chunks'], 625)
        self.assertGreater(summary['mean_ms'], 0.0)
        self.assertIn('std_ms', summary)
        self.assertEqual(summary['latency_samples'], 288)
        self.assertEqual(wav_read(out / 'stream.wav').length, 5 * 24000)
        self.assertEqual((out / 'stream.f32').stat().st_size, 4 * 5 * 24000)
        self.assertEqual(len((out / 'chunk_timings.csv').read_text().splitlines()), 626)
        metadata = read_json(out / 'run_metadata.json')
        self.assertEqual(metadata['command'], 'stream')

    def test_stream_benchmark_only(self):
        self.run_command('stream', {'checkpoint': str(self.checkpoint), 'sectors': [3], 'benchmark_chunks': 50})
        self.assertEqual(ExperimentRun.objects.get().summary['benchmark']['chunks'], 50)

    def test_stream_needs_input_or_benchmark(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('stream', {'checkpoint': str(self.checkpoint), 'sectors': [3]})
        self.assertEqual(ctx.exception.returncode, 2)

    def test_corrupt_checkpoint(self):
        broken = self.tmp / 'broken.ssdx'
        broken.write_bytes(self.checkpoint.read_bytes()[:-10])
        with self.assertRaises(CommandError) as ctx:
            self.run_command('stream', {'checkpoint': str(broken), 'sectors': [3], 'benchmark_chunks': 5})
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('checkpoint', str(ctx.exception))
