"""
Tests for corpus loading.
"""
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import ResourceError, SignalLookupError
from apps.scenes.corpus import Corpus, load_corpus, synthesize_corpus
from apps.signal_core.audio import AudioBuffer, wav_write


class CorpusTests(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_synthetic_corpus_is_peak_normalized(self):
        corpus = load_corpus(synthesize_corpus(self.tmp, 2, seed=1))
        self.assertEqual(corpus.ids, ['synth-0000', 'synth-0001'])
        self.assertAlmostEqual(np.max(np.abs(corpus.load('synth-0001'))), 0.5, places=6)

    def test_directory_skips_short_clips(self):
        rng = np.random.default_rng(0)
        wav_write(AudioBuffer(rng.standard_normal(24000 * 3) * 0.1), self.tmp / 'long.wav')
        wav_write(AudioBuffer(rng.standard_normal(24000) * 0.1), self.tmp / 'short.wav')
        corpus = load_corpus(self.tmp)
        self.assertEqual(corpus.ids, ['long'])
        with self.assertRaises(SignalLookupError):
            corpus.load('short')

    def test_nothing_usable(self):
        wav_write(AudioBuffer(np.zeros(2400)), self.tmp / 'tiny.wav')
        with self.assertRaises(ResourceError):
            load_corpus(self.tmp)

    def test_load_cache_is_bounded(self):
        clips = load_corpus(synthesize_corpus(self.tmp, 4, seed=2, seconds=3.0)).clips
        corpus = Corpus(clips=clips, cache_size=2)
        for signal_id in corpus.ids:
            corpus.load(signal_id)
        info = corpus.cache_info()
        self.assertEqual(info.currsize, 2)
        self.assertEqual(info.misses, 4)
        corpus.load('synth-0003')
        self.assertEqual(corpus.cache_info().hits, 1)

    def test_evicted_clip_reloads_identically(self):
        clips = load_corpus(synthesize_corpus(self.tmp, 3, seed=2, seconds=3.0)).clips
        corpus = Corpus(clips=clips, cache_size=1)
        first = corpus.load('synth-0000').copy()
        corpus.load('synth-0001')
        np.testing.assert_array_equal(corpus.load('synth-0000'), first)
        self.assertEqual(corpus.cache_info().misses, 3)
