"""
Tests for chunked streaming against offline processing.
"""
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import ArgumentError, CompatibilityError, FormatError
from apps.dsx.angle import AngleQuery
from apps.dsx.config import NetConfig
from apps.dsx.inference import forward_offline
from apps.dsx.streaming import (
    benchmark, read_interleaved, start_stream, stream_audio, stream_flush, stream_step, write_raw,
)
from apps.dsx.testing import TINY, tiny_checkpoint


class StreamEquivalenceTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(21)
        self.query = AngleQuery.of([3], 6)

    def assert_matches_offline(self, checkpoint, audio):
        offline = forward_offline(audio, self.query, checkpoint)
        streamed, timings = stream_audio(audio, self.query, checkpoint)
        self.assertEqual(streamed.shape, offline.shape)
        lookahead = checkpoint.config.lookahead_samples
        self.assertLessEqual(np.max(np.abs(streamed[lookahead:] - offline[lookahead:])), 1e-5)
        return timings

    def test_ten_default_chunks(self):
        checkpoint = tiny_checkpoint(seed=3, config=NetConfig())
        timings = self.assert_matches_offline(checkpoint, self.rng.standard_normal((2, 1920)) * 0.1)
        self.assertEqual(len(timings), 10)

    def test_random_tiny_checkpoints(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                audio = self.rng.standard_normal((2, 200)) * 0.1
                self.assert_matches_offline(tiny_checkpoint(seed=seed), audio)

    def test_partial_final_chunk(self):
        self.assert_matches_offline(tiny_checkpoint(seed=8), self.rng.standard_normal((2, 203)) * 0.1)

    def test_prefix_outputs_do_not_depend_on_later_chunks(self):
        checkpoint = tiny_checkpoint(seed=2)
        audio = self.rng.standard_normal((2, 16 * TINY.chunk_samples))
        other = audio.copy()
        other[:, 8 * TINY.chunk_samples:] = self.rng.standard_normal((2, 8 * TINY.chunk_samples))
        outputs = []
        for signal in (audio, other):
            state = start_stream(checkpoint, self.query)
            chunks = []
            for k in range(16):
                out, state = stream_step(signal[:, k * 8:(k + 1) * 8], self.query, state, checkpoint)
                chunks.append(out)
            outputs.append(np.concatenate(chunks))
        np.testing.assert_array_equal(outputs[0][:64], outputs[1][:64])


class StreamContractTests(SimpleTestCase):

    def setUp(self):
        self.checkpoint = tiny_checkpoint(seed=0)
        self.query = AngleQuery.of([1], 6)
        self.state = start_stream(self.checkpoint, self.query)
        self.chunk = np.zeros((2, TINY.chunk_samples))

    def test_state_counts_frames(self):
        _, state = stream_step(self.chunk, self.query, self.state, self.checkpoint)
        _, state = stream_step(self.chunk, self.query, state, self.checkpoint)
        self.assertEqual(state.frames, 2)
        self.assertEqual(self.state.frames, 0)

    def test_query_change_needs_a_new_stream(self):
        _, state = stream_step(self.chunk, self.query, self.state, self.checkpoint)
        with self.assertRaises(CompatibilityError):
            stream_step(self.chunk, AngleQuery.of([2], 6), state, self.checkpoint)

    def test_wrong_chunk_size(self):
        with self.assertRaises(ArgumentError):
            stream_step(np.zeros((2, 7)), self.query, self.state, self.checkpoint)
        with self.assertRaises(ArgumentError):
            stream_step(np.zeros((2, 9)), self.query, self.state, self.checkpoint, final=True)

    def test_final_chunk_closes_the_stream(self):
        out, state = stream_step(np.zeros((2, 5)), self.query, self.state, self.checkpoint, final=True)
        self.assertEqual(out.shape, (TINY.chunk_samples,))
        with self.assertRaises(CompatibilityError):
            stream_step(self.chunk, self.query, state, self.checkpoint)
        tail, state = stream_flush(state, self.checkpoint)
        self.assertEqual(tail.shape, (TINY.lookahead_samples,))
        with self.assertRaises(CompatibilityError):
            stream_flush(state, self.checkpoint)

    def test_sector_count_mismatch(self):
        with self.assertRaises(CompatibilityError):
            start_stream(self.checkpoint, AngleQuery.of([1], 9))

    def test_benchmark(self):
        result = benchmark(self.checkpoint, self.query, n_chunks=20)
        self.assertEqual(result['chunks'], 20)
        self.assertGreater(result['mean_ms'], 0.0)
        self.assertGreaterEqual(result['std_ms'], 0.0)


class InterleavedFileTests(SimpleTestCase):

    def test_read_interleaved(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'in.f32'
            np.array([1, 10, 2, 20, 3, 30], dtype='<f4').tofile(path)
            np.testing.assert_array_equal(read_interleaved(path), [[1, 2, 3], [10, 20, 30]])

    def test_odd_sample_count(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'in.f32'
            write_raw(path, np.ones(5))
            with self.assertRaises(FormatError):
                read_interleaved(path)
