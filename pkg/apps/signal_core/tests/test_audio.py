"""
Tests for the WAV codec and AudioBuffer.
"""
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from scipy.io import wavfile

from apps.common.exceptions import ArgumentError, FormatError, UnsupportedError
from apps.signal_core.audio import AudioBuffer, resample, wav_read, wav_write


class AudioBufferTests(SimpleTestCase):

    def test_mono_data_becomes_one_channel(self):
        buffer = AudioBuffer(np.zeros(10))
        self.assertEqual(buffer.channels, 1)
        self.assertEqual(buffer.length, 10)

    def test_other_rates_are_rejected(self):
        with self.assertRaises(ArgumentError):
            AudioBuffer(np.zeros(10), rate=48000)

    def test_from_channels_requires_equal_lengths(self):
        with self.assertRaises(ArgumentError):
            AudioBuffer.from_channels([np.zeros(4), np.zeros(5)])


class WavCodecTests(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_pcm16_full_scale_value(self):
        path = self.tmp / 'max.wav'
        wavfile.write(path, 24000, np.array([32767, 0, -32768], dtype=np.int16))
        buffer = wav_read(path)
        self.assertAlmostEqual(buffer.data[0, 0], 32767 / 32768, places=12)
        self.assertEqual(buffer.data[0, 2], -1.0)

    def test_48khz_input_is_resampled(self):
        path = self.tmp / 'hi.wav'
        wavfile.write(path, 48000, np.zeros(4800, dtype=np.float32))
        buffer = wav_read(path)
        self.assertEqual(buffer.rate, 24000)
        self.assertEqual(buffer.length, 2400)

    def test_resampled_tone_keeps_its_amplitude(self):
        t = np.arange(48000) / 48000
        tone = 0.5 * np.sin(2 * np.pi * 1000 * t)
        out = resample(tone, 48000, 24000)
        self.assertEqual(out.shape[-1], 24000)
        middle = out[2000:-2000]
        self.assertAlmostEqual(np.max(np.abs(middle)), 0.5, delta=5e-3)

    def test_truncated_data_chunk_is_a_format_error(self):
        path = self.tmp / 'cut.wav'
        wav_write(AudioBuffer(np.linspace(-0.5, 0.5, 1000)), path, 'pcm16')
        raw = path.read_bytes()
        path.write_bytes(raw[:-100])
        with self.assertRaises(FormatError):
            wav_read(path)

    def test_not_a_riff_file(self):
        path = self.tmp / 'junk.wav'
        path.write_bytes(b'hello world, not audio')
        with self.assertRaises(FormatError):
            wav_read(path)

    def test_8bit_pcm_is_unsupported(self):
        path = self.tmp / 'u8.wav'
        wavfile.write(path, 24000, np.full(100, 128, dtype=np.uint8))
        with self.assertRaises(UnsupportedError):
            wav_read(path)

    def test_float32_round_trip_is_bit_identical(self):
        rng = np.random.default_rng(3)
        data = rng.uniform(-1, 1, (2, 999)).astype(np.float32).astype(np.float64)
        path = self.tmp / 'f32.wav'
        wav_write(AudioBuffer(data), path, 'float32')
        np.testing.assert_array_equal(wav_read(path).data, data)

    def test_pcm16_round_trip_error_bound(self):
        path = self.tmp / 'half.wav'
        wav_write(AudioBuffer(np.full(64, 0.5)), path, 'pcm16')
        err = np.max(np.abs(wav_read(path).data - 0.5))
        self.assertLessEqual(err, 1 / 32768)

    def test_unknown_encoding(self):
        with self.assertRaises(ArgumentError):
            wav_write(AudioBuffer(np.zeros(4)), self.tmp / 'x.wav', 'mp3')

    def test_unwritable_path_raises_os_error(self):
        with self.assertRaises(OSError):
            wav_write(AudioBuffer(np.zeros(4)), self.tmp / 'missing' / 'dir' / 'x.wav')
