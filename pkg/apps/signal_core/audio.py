"""
Audio buffers and the WAV codec.

Every buffer in the lab runs at 24 kHz; ``wav_read`` resamples other rates on
ingestion with a 64-tap Kaiser (beta 8) windowed-sinc polyphase filter.
"""
import logging
import math
import struct
from pathlib import Path

import attrs
import numpy as np
from scipy import signal as sps
from scipy.io import wavfile

from apps.common.exceptions import ArgumentError, FormatError, UnsupportedError

logger = logging.getLogger(__name__)

SAMPLE_RATE = 24000
RESAMPLER_TAPS = 64
RESAMPLER_BETA = 8.0

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_IEEE_FLOAT = 3
ENCODINGS = ('pcm16', 'float32')


def _as_channels(data):
    array = np.asarray(data, dtype=np.float64)
    if array.ndim == 1:
        array = array[np.newaxis, :]
    if array.ndim != 2:
        raise ArgumentError(f'audio data must be 1-D or 2-D, got {array.ndim}-D')
    return array


@attrs.frozen(eq=False)
class AudioBuffer:
    """
    Multichannel waveform at the lab rate.

    ``data`` has shape (channels, length); all channels share one length by
    construction.
    """

    data: np.ndarray = attrs.field(converter=_as_channels)
    rate: int = attrs.field(default=SAMPLE_RATE)

    @rate.validator
    def _check_rate(self, attribute, value):
        if value != SAMPLE_RATE:
            raise ArgumentError(f'buffers run at {SAMPLE_RATE} Hz only, got {value}')

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def length(self):
        return self.data.shape[1]

    @property
    def duration(self):
        return self.length / self.rate

    def channel(self, index):
        return self.data[index]

    @classmethod
    def from_channels(cls, channels):
        """Stack equal-length 1-D arrays into one buffer."""
        lengths = {len(c) for c in channels}
        if len(lengths) != 1:
            raise ArgumentError(f'channels differ in length: {sorted(lengths)}')
        return cls(np.stack([np.asarray(c, dtype=np.float64) for c in channels]))


def resample(data, rate_in, rate_out=SAMPLE_RATE):
    """
    Resample along the last axis with the fixed windowed-sinc design.

    Output length is ``floor(N * rate_out / rate_in + 0.5)``.
    """
    data = np.asarray(data, dtype=np.float64)
    if rate_in == rate_out:
        return data.copy()
    common = math.gcd(int(rate_in), int(rate_out))
    up, down = int(rate_out) // common, int(rate_in) // common
    taps = sps.firwin(
        RESAMPLER_TAPS * up,
        1.0 / max(up, down),
        window=('kaiser', RESAMPLER_BETA),
    ) * up
    out = sps.resample_poly(data, up, down, axis=-1, window=taps)
    target = int(math.floor(data.shape[-1] * up / down + 0.5))
    if out.shape[-1] < target:
        pad = [(0, 0)] * (out.ndim - 1) + [(0, target - out.shape[-1])]
        out = np.pad(out, pad)
    return out[..., :target]


def _inspect_riff(raw):
    """
    Walk the RIFF chunks of a WAV file.

    Returns:
        tuple: (format_tag, channels, rate, bits_per_sample)

    Raises:
        FormatError: On a missing/short header or a truncated chunk
        UnsupportedError: On encodings other than PCM16 / float32
    """
    if len(raw) < 12 or raw[0:4] != b'RIFF' or raw[8:12] != b'WAVE':
        raise FormatError('not a RIFF/WAVE file')
    offset = 12
    fmt = None
    data_seen = False
    while offset + 8 <= len(raw):
        chunk_id = raw[offset:offset + 4]
        (size,) = struct.unpack('<I', raw[offset + 4:offset + 8])
        body = offset + 8
        if body + size > len(raw):
            raise FormatError(f'truncated {chunk_id!r} chunk: {size} bytes declared, '
                              f'{len(raw) - body} present')
        if chunk_id == b'fmt ':
            if size < 16:
                raise FormatError('fmt chunk shorter than 16 bytes')
            fmt = struct.unpack('<HHIIHH', raw[body:body + 16])
        elif chunk_id == b'data':
            data_seen = True
        offset = body + size + (size & 1)
    if fmt is None or not data_seen:
        raise FormatError('missing fmt or data chunk')
    format_tag, channels, rate, _, _, bits = fmt
    supported = {(WAVE_FORMAT_PCM, 16), (WAVE_FORMAT_IEEE_FLOAT, 32)}
    if (format_tag, bits) not in supported:
        raise UnsupportedError(f'unsupported WAV encoding: format {format_tag}, {bits} bits')
    return format_tag, channels, rate, bits


def wav_read(path):
    """
    Read a PCM16 or float32 WAV file into a 24 kHz AudioBuffer.

    Args:
        path: File path

    Returns:
        AudioBuffer: samples scaled to [-1, 1], resampled to 24 kHz if needed
    """
    path = Path(path)
    _inspect_riff(path.read_bytes())
    try:
        rate, samples = wavfile.read(path)
    except ValueError as exc:
        raise FormatError(f'{path}: {exc}') from exc

    if samples.dtype == np.int16:
        data = samples.astype(np.float64) / 32768.0
    else:
        data = samples.astype(np.float64)
    data = data.T if data.ndim == 2 else data[np.newaxis, :]

    if rate != SAMPLE_RATE:
        logger.debug(f'Resampling {path.name} from {rate} Hz to {SAMPLE_RATE} Hz')
        data = resample(data, rate, SAMPLE_RATE)
    return AudioBuffer(data)


def wav_write(buffer, path, encoding='float32'):
    """
    Write ``buffer`` as a WAV file.

    Args:
        buffer: AudioBuffer to write
        path: Destination path (parent directories must exist)
        encoding: 'pcm16' or 'float32'
    """
    if encoding not in ENCODINGS:
        raise ArgumentError(f'encoding must be one of {ENCODINGS}, got {encoding!r}')
    if encoding == 'pcm16':
        scaled = np.clip(np.round(buffer.data * 32768.0), -32768, 32767)
        samples = scaled.astype(np.int16)
    else:
        samples = buffer.data.astype(np.float32)
    wavfile.write(Path(path), buffer.rate, samples.T if buffer.channels > 1 else samples[0])
    return Path(path)
