"""
Framed DFT analysis and weighted overlap-add synthesis.

The analysis window is a periodic Hann window; the synthesis window is its
canonical dual, ``w_s[n] = w_a[n] / sum_k w_a[n - k*hop]**2``, which gives
perfect reconstruction for the 288/192 geometry where plain Hann overlap-add
is not constant.
"""
import functools

import attrs
import numpy as np
from scipy import signal as sps

from apps.common.exceptions import ArgumentError, ShapeError, SizeError

from .audio import AudioBuffer

WINDOWS = ('hann', 'rect')


def _positive(instance, attribute, value):
    if value <= 0:
        raise ArgumentError(f'{attribute.name} must be positive, got {value}')


@attrs.frozen
class FrameSpec:
    """Frame geometry: window length, hop and analysis window shape."""

    window_len: int = attrs.field(default=288, validator=_positive)
    hop: int = attrs.field(default=192, validator=_positive)
    window: str = attrs.field(default='hann', validator=attrs.validators.in_(WINDOWS))

    def __attrs_post_init__(self):
        if self.hop > self.window_len:
            raise ArgumentError(f'hop {self.hop} exceeds window length {self.window_len}')

    @property
    def pad(self):
        return self.window_len - self.hop

    @property
    def bins(self):
        return self.window_len // 2 + 1

    @functools.cached_property
    def analysis_window(self):
        if self.window == 'rect':
            return np.ones(self.window_len)
        return sps.get_window('hann', self.window_len, fftbins=True)

    @functools.cached_property
    def wola_denominator(self):
        """Per-position sum of squared analysis windows over all overlapping frames."""
        squared = self.analysis_window ** 2
        denominator = np.zeros(self.window_len)
        reach = self.window_len // self.hop + 1
        for k in range(-reach, reach + 1):
            shift = k * self.hop
            lo, hi = max(0, shift), min(self.window_len, self.window_len + shift)
            if lo < hi:
                denominator[lo:hi] += squared[lo - shift:hi - shift]
        return denominator

    @functools.cached_property
    def synthesis_window(self):
        denominator = self.wola_denominator
        if np.any(denominator <= 0):
            raise ArgumentError(
                f'WOLA denominator vanishes for window {self.window_len}, hop {self.hop}'
            )
        return self.analysis_window / denominator

    def frame_count(self, length):
        """Frames needed to cover ``length`` samples plus both boundary pads."""
        padded = length + 2 * self.pad
        if padded < self.window_len:
            raise SizeError(
                f'{length} samples are shorter than one frame after padding'
            )
        return 1 + -(-(padded - self.window_len) // self.hop)


DEFAULT_FRAME = FrameSpec()


@attrs.frozen(eq=False)
class Spectrogram:
    """Complex one-sided spectrogram of shape (channels, bins, frames)."""

    data: np.ndarray

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def bins(self):
        return self.data.shape[1]

    @property
    def frames(self):
        return self.data.shape[2]


def frame_signal(samples, frame_spec):
    """
    Zero-pad and frame a (channels, length) array.

    Returns:
        ndarray: (channels, frames, window_len) windowed frames
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    length = samples.shape[-1]
    n_frames = frame_spec.frame_count(length)
    total = (n_frames - 1) * frame_spec.hop + frame_spec.window_len
    tail = total - length - frame_spec.pad
    padded = np.pad(samples, ((0, 0), (frame_spec.pad, tail)))
    frames = np.lib.stride_tricks.sliding_window_view(padded, frame_spec.window_len, axis=-1)
    return frames[:, ::frame_spec.hop][:, :n_frames] * frame_spec.analysis_window


def stft(buffer, frame_spec=DEFAULT_FRAME):
    """
    Analyse every channel of ``buffer``.

    Frame t covers padded samples [t*hop, t*hop + window_len), i.e. original
    samples [t*hop - pad, t*hop + hop).
    """
    data = buffer.data if isinstance(buffer, AudioBuffer) else buffer
    frames = frame_signal(data, frame_spec)
    spectra = np.fft.rfft(frames, axis=-1)
    return Spectrogram(np.transpose(spectra, (0, 2, 1)))


def overlap_add(frames, frame_spec, out_len):
    """
    Weighted overlap-add of synthesis frames.

    Args:
        frames: (channels, frames, window_len) time-domain frames
        frame_spec: Frame geometry
        out_len: Number of output samples (after removing the leading pad)
    """
    channels, n_frames, width = frames.shape
    total = (n_frames - 1) * frame_spec.hop + width
    out = np.zeros((channels, max(total, frame_spec.pad + out_len)))
    weighted = frames * frame_spec.synthesis_window
    for t in range(n_frames):
        start = t * frame_spec.hop
        out[:, start:start + width] += weighted[:, t]
    return out[:, frame_spec.pad:frame_spec.pad + out_len]


def istft(spectrogram, frame_spec=DEFAULT_FRAME, out_len=None):
    """
    Resynthesize a spectrogram produced by ``stft`` with the same geometry.

    Args:
        spectrogram: Spectrogram with frame_spec.bins bins
        frame_spec: Frame geometry
        out_len: Output length; defaults to frames * hop

    Returns:
        AudioBuffer: reconstructed channels
    """
    data = spectrogram.data if isinstance(spectrogram, Spectrogram) else spectrogram
    if data.ndim != 3 or data.shape[1] != frame_spec.bins:
        raise ShapeError(
            f'spectrogram shape {data.shape} does not match {frame_spec.bins} bins'
        )
    if out_len is None:
        out_len = data.shape[2] * frame_spec.hop
    frames = np.fft.irfft(np.transpose(data, (0, 2, 1)), n=frame_spec.window_len, axis=-1)
    return AudioBuffer(overlap_add(frames, frame_spec, out_len))
