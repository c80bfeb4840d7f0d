"""
Speech corpora.

A corpus is either a directory of mono WAV files (ids are the file stems,
sorted) or a JSON-lines corpus manifest of ``{"signal_id", "path"}`` rows
with paths relative to the manifest. Clips are peak-normalized to 0.5 when
loaded.
"""
import functools
import logging
from pathlib import Path

import attrs
import numpy as np
from scipy import signal as sps

from apps.common.exceptions import FormatError, ResourceError, SignalLookupError
from apps.common.files import read_jsonl, write_jsonl
from apps.common.random import make_rng
from apps.signal_core.audio import SAMPLE_RATE, AudioBuffer, wav_read, wav_write
from apps.signal_core.filters import peak_normalize

logger = logging.getLogger(__name__)

MIN_CLIP_SECONDS = 3.0
CLIP_CACHE_SIZE = 256
CORPUS_MANIFEST = 'corpus.jsonl'


@attrs.frozen
class CorpusClip:
    signal_id: str
    path: Path = attrs.field(converter=Path)


def read_clip(clip):
    """
    Peak-normalized samples of one clip file.

    Raises:
        FormatError: Multichannel file
    """
    buffer = wav_read(clip.path)
    if buffer.channels != 1:
        raise FormatError(f'{clip.path}: corpus clips must be mono, got {buffer.channels} channels')
    return peak_normalize(buffer.channel(0))


@attrs.define
class Corpus:
    """Ordered clips behind a bounded LRU load cache."""

    clips: list
    cache_size: int = attrs.field(default=CLIP_CACHE_SIZE, kw_only=True)
    _index: dict = attrs.field(init=False, repr=False)
    _load: object = attrs.field(init=False, repr=False)

    def __attrs_post_init__(self):
        self._index = {clip.signal_id: clip for clip in self.clips}
        self._load = functools.lru_cache(maxsize=self.cache_size)(self._read)

    def __len__(self):
        return len(self.clips)

    @property
    def ids(self):
        return [clip.signal_id for clip in self.clips]

    def _read(self, signal_id):
        return read_clip(self._index[signal_id])

    def load(self, signal_id):
        """
        Peak-normalized samples of one clip.

        Raises:
            SignalLookupError: Unknown id
            FormatError: Multichannel file
        """
        if signal_id not in self._index:
            raise SignalLookupError(f'no clip {signal_id!r} in corpus')
        return self._load(signal_id)

    def cache_info(self):
        return self._load.cache_info()


def load_corpus(path, min_seconds=MIN_CLIP_SECONDS):
    """
    Open a corpus directory or corpus manifest, keeping clips of at least
    ``min_seconds``.

    Raises:
        ResourceError: If no usable clip remains
    """
    path = Path(path)
    if path.is_dir():
        manifest = path / CORPUS_MANIFEST
        if manifest.exists():
            return load_corpus(manifest, min_seconds)
        clips = [CorpusClip(p.stem, p) for p in sorted(path.glob('*.wav'))]
    else:
        rows = read_jsonl(path)
        try:
            clips = [CorpusClip(row['signal_id'], path.parent / row['path']) for row in rows]
        except (KeyError, TypeError) as exc:
            raise FormatError(f'{path}: corpus rows need signal_id and path') from exc
    usable = []
    for clip in clips:
        samples = read_clip(clip)
        if len(samples) < min_seconds * SAMPLE_RATE:
            logger.warning(f'Skipping {clip.signal_id}: shorter than {min_seconds} s')
            continue
        usable.append(clip)
    if not usable:
        raise ResourceError(f'corpus {path} has no clip of at least {min_seconds} s')
    logger.info(f'Loaded corpus {path}: {len(usable)} clips')
    return Corpus(clips=usable)


def synthetic_utterance(rng, seconds, rate=SAMPLE_RATE):
    """
    Speech-like test signal: a gliding harmonic source with syllabic
    envelope, shaped by three random formant resonances.
    """
    n = int(round(seconds * rate))
    t = np.arange(n) / rate
    f0 = rng.uniform(90.0, 220.0) * (1.0 + 0.1 * np.sin(2 * np.pi * rng.uniform(0.3, 1.0) * t))
    phase = 2 * np.pi * np.cumsum(f0) / rate
    voiced = sum(np.sin(k * phase) / k for k in range(1, 30) if np.all(k * f0 < rate / 2))
    noise = 0.05 * rng.standard_normal(n)
    excitation = voiced + noise
    for formant in sorted(rng.uniform([400, 1000, 2200], [900, 2000, 3500])):
        b, a = sps.iirpeak(formant, Q=5.0, fs=rate)
        excitation = excitation + 2.0 * sps.lfilter(b, a, excitation)
    syllables = 0.5 * (1.0 - np.cos(2 * np.pi * rng.uniform(3.0, 5.0) * t + rng.uniform(0, 2 * np.pi)))
    return peak_normalize(excitation * syllables)


def synthesize_corpus(out_dir, n_clips, seed=0, seconds=MIN_CLIP_SECONDS + 0.5):
    """
    Write ``n_clips`` synthetic utterances plus a corpus manifest.

    Returns:
        Path: the corpus manifest
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for index in range(n_clips):
        signal_id = f'synth-{index:04d}'
        samples = synthetic_utterance(make_rng(seed, index), seconds)
        wav_write(AudioBuffer(samples), out_dir / f'{signal_id}.wav', encoding='float32')
        rows.append({'signal_id': signal_id, 'path': f'{signal_id}.wav'})
    logger.info(f'Synthesized {n_clips} clips under {out_dir}')
    return write_jsonl(out_dir / CORPUS_MANIFEST, rows)
