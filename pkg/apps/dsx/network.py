"""
Directional speech extraction network.

Pipeline: two-channel STFT -> seven feature planes -> 2-D conv encoder ->
N FiLM-conditioned separation blocks -> bias-free transposed-conv decoder
-> complex spectrogram estimate of the target at the reference mic -> WOLA
synthesis.

Every stage works on one frame at a time except the causal LSTM inside each
block, which carries (h, c) across frames. This is what makes chunked
streaming reproduce offline processing.
"""
import functools
import logging

import numpy as np

from apps.autodiff import ops
from apps.autodiff.tensor import Tensor, as_tensor
from apps.common.exceptions import CompatibilityError, ShapeError
from apps.common.random import make_rng
from apps.features.spatial import FEATURE_CHANNELS, encode_features
from apps.signal_core.framing import stft

from .angle import sector_weights
from .layers import LSTM, Conv1d, Conv2d, ConvTranspose2d, Dense, LayerNorm, Module, PReLU

logger = logging.getLogger(__name__)

ACTIVITY_FLOOR = 1e-6
INIT_STREAM = 7


def activity_gate(x_ref):
    """|X_ref| / (|X_ref| + 1e-6): zero exactly where the reference mic is silent."""
    magnitude = np.abs(x_ref)
    return magnitude / (magnitude + ACTIVITY_FLOOR)


class AngleEncoder(Module):
    """Sector query -> (c, F, 1) conditioning planes."""

    def __init__(self, rng, config):
        width = config.embed_channels * config.bins
        self.refine = Dense(rng, config.n_sectors, config.angle_hidden)
        self.refine_act = PReLU(config.angle_hidden)
        self.project = Dense(rng, config.angle_hidden, width)
        self.norm = LayerNorm(width)
        self._shape = (config.embed_channels, config.bins, 1)

    def __call__(self, query):
        raw = Tensor(sector_weights(query)[np.newaxis, :])
        hidden = self.refine_act(self.refine(raw))
        return self.norm(self.project(hidden)).reshape(self._shape)


class SeparationBlock(Module):
    """
    LayerNorm + PReLU, strided conv down the frequency axis, BLSTM across
    frequency within each frame, transposed conv back up with a skip, a
    second LayerNorm, a causal LSTM across frames per frequency, and a
    FiLM modulation from the angle embedding added to the block input.
    """

    def __init__(self, rng, config):
        c = config.embed_channels
        s = config.freq_downsample
        self.norm_in = LayerNorm(c)
        self.act_in = PReLU(c)
        self.down = Conv2d(rng, c, c, (s, 1), stride=(s, 1))
        self.freq_forward = LSTM(rng, c, config.blstm_hidden)
        self.freq_backward = LSTM(rng, c, config.blstm_hidden)
        self.freq_fc = Dense(rng, 2 * config.blstm_hidden, c)
        self.up = ConvTranspose2d(rng, c, c, (s, 1), stride=(s, 1), output_padding=(config.bins % s, 0))
        self.norm_mid = LayerNorm(c)
        self.time_lstm = LSTM(rng, c, config.causal_lstm_hidden)
        self.time_fc = Dense(rng, config.causal_lstm_hidden, c)
        self.film_scale = Conv1d(rng, c, c, kernel=1)
        self.film_shift = Conv1d(rng, c, c, kernel=1)

    def trunk(self, x, state=None):
        """
        Args:
            x: (1, c, F, T)
            state: Causal LSTM (h, c), each (F, hidden), or None

        Returns:
            tuple: trunk output (1, c, F, T) and the new state
        """
        _, c, bins, frames = x.shape
        y = self.act_in(self.norm_in(x.transpose((0, 3, 2, 1)))).transpose((0, 3, 2, 1))
        down = self.down(y)
        reduced = down.shape[2]
        across = down.transpose((0, 3, 2, 1)).reshape((frames, reduced, c))
        forward, _ = self.freq_forward(across)
        backward, _ = self.freq_backward(across, reverse=True)
        merged = self.freq_fc(ops.concat([forward, backward], axis=-1))
        merged = merged.reshape((1, frames, reduced, c)).transpose((0, 3, 2, 1))
        restored = self.up(merged) + y
        normed = self.norm_mid(restored.transpose((0, 3, 2, 1)))
        along = normed.reshape((frames, bins, c)).transpose((1, 0, 2))
        out, new_state = self.time_lstm(along, state)
        trunk = self.time_fc(out).transpose((2, 0, 1)).reshape((1, c, bins, frames))
        return trunk, new_state

    def __call__(self, x, embedding, state=None):
        trunk, new_state = self.trunk(x, state)
        _, c, bins, _ = x.shape
        condition = embedding.reshape((1, c, bins))
        scale = self.film_scale(condition).reshape((1, c, bins, 1))
        shift = self.film_shift(condition).reshape((1, c, bins, 1))
        return x + trunk * scale + shift, new_state


class DSXNet(Module):

    def __init__(self, config, seed=0):
        rng = make_rng(seed, INIT_STREAM)
        c = config.embed_channels
        self._config = config
        self.encoder = Conv2d(rng, len(FEATURE_CHANNELS), c, (3, 1), padding=(1, 0))
        self.encoder_act = PReLU(c, axis=1)
        self.angle = AngleEncoder(rng, config)
        self.blocks = [SeparationBlock(rng, config) for _ in range(config.n_blocks)]
        self.decoder = ConvTranspose2d(rng, c, 2, (3, 1), padding=(1, 0), bias=False)
        logger.debug(f'Built network: {self.parameter_count()} parameters, {config.n_blocks} blocks')

    @property
    def config(self):
        return self._config

    def encode_angle(self, query):
        """
        Raises:
            CompatibilityError: If the query uses another sector count
        """
        if query.n_sectors != self.config.n_sectors:
            raise CompatibilityError(
                f'query over {query.n_sectors} sectors given to a {self.config.n_sectors}-sector network'
            )
        return self.angle(query)

    def forward_frames(self, features, activity, embedding, states=None):
        """
        Args:
            features: (7, F, T) feature planes
            activity: (F, T) input-activity gate
            embedding: (c, F, 1) angle conditioning
            states: Per-block causal LSTM states, or None for a fresh start

        Returns:
            tuple: (2, F, T) Tensor of real and imaginary target planes, new states
        """
        features = as_tensor(features)
        channels, bins, frames = features.shape
        if channels != len(FEATURE_CHANNELS) or bins != self.config.bins:
            raise ShapeError(f'features {features.shape} do not match a {self.config.bins}-bin network')
        states = list(states) if states is not None else [None] * len(self.blocks)
        x = self.encoder_act(self.encoder(features.reshape((1, channels, bins, frames))))
        new_states = []
        for block, state in zip(self.blocks, states):
            x, state = block(x, embedding, state)
            new_states.append(state)
        spectrum = self.decoder(x).reshape((2, bins, frames))
        return spectrum * np.asarray(activity)[np.newaxis], new_states


def analyse(audio, stats, frame_spec):
    """
    Feature planes and activity gate of a (2, length) mixture.

    Raises:
        CompatibilityError: Stats fitted for another bin count
        ShapeError: Audio is not two-channel
    """
    audio = np.asarray(audio, dtype=np.float64)
    if audio.ndim != 2 or audio.shape[0] != 2:
        raise ShapeError(f'mixtures are (2, length), got {audio.shape}')
    if stats.bins != frame_spec.bins:
        raise CompatibilityError(f'stats over {stats.bins} bins do not fit {frame_spec.bins}-bin frames')
    spectra = stft(audio, frame_spec).data
    return encode_features(spectra[0], spectra[1], stats).data, activity_gate(spectra[0])


@functools.lru_cache(maxsize=8)
def synthesis_basis(frame_spec):
    """
    Real matrices (bins, window_len) with frame = Re X @ cos_part + Im X @ sin_part,
    matching ``np.fft.irfft`` (imaginary parts of DC and Nyquist are ignored).
    """
    n = frame_spec.window_len
    k = np.arange(frame_spec.bins)[:, np.newaxis]
    phase = 2.0 * np.pi * k * np.arange(n)[np.newaxis, :] / n
    weight = np.full((frame_spec.bins, 1), 2.0)
    weight[0] = 1.0
    if n % 2 == 0:
        weight[-1] = 1.0
    return weight * np.cos(phase) / n, -weight * np.sin(phase) / n


def synthesis_frames(spectrum, frame_spec):
    """(2, F, T) spectrum -> (T, window_len) synthesis-windowed time frames."""
    cos_part, sin_part = synthesis_basis(frame_spec)
    frames = spectrum[0].transpose((1, 0)) @ cos_part + spectrum[1].transpose((1, 0)) @ sin_part
    return frames * frame_spec.synthesis_window


def synthesize(spectrum, frame_spec, length):
    """Differentiable WOLA synthesis of ``length`` samples."""
    signal = ops.overlap_add(synthesis_frames(spectrum, frame_spec), frame_spec.hop)
    return signal[frame_spec.pad:frame_spec.pad + length]


def estimate(model, stats, audio, query, embedding=None):
    """Target estimate Tensor for one mixture, recorded on the tape when gradients are on."""
    frame_spec = model.config.frame
    features, activity = analyse(audio, stats, frame_spec)
    if embedding is None:
        embedding = model.encode_angle(query)
    spectrum, _ = model.forward_frames(features, activity, embedding)
    return synthesize(spectrum, frame_spec, np.shape(audio)[1])
