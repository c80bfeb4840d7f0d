"""
Inter-channel features of a two-channel spectrogram.

X1 is the reference microphone, X2 the microstructure microphone. The
feature stack has seven channels in the order
[Re X1, Im X1, Re X2, Im X2, cos IPD, sin IPD, ILD].
"""
import attrs
import numpy as np

from apps.common.exceptions import ShapeError
from apps.signal_core.framing import DEFAULT_FRAME, stft

MAGNITUDE_FLOOR = 1e-8
FEATURE_CHANNELS = ('re_x1', 'im_x1', 're_x2', 'im_x2', 'cos_ipd', 'sin_ipd', 'ild')
SPATIAL_CHANNELS = FEATURE_CHANNELS[4:]


def _check_pair(x1, x2):
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    if x1.shape != x2.shape:
        raise ShapeError(f'channel shapes differ: {x1.shape} vs {x2.shape}')
    return x1, x2


def interchannel_features(x1, x2):
    """
    Phase and level difference of X2 relative to X1.

    Returns:
        tuple[ndarray, ndarray]: IPD in (-pi, pi], ILD in dB
    """
    x1, x2 = _check_pair(x1, x2)
    ipd = np.angle(x2 * np.conj(x1))
    ipd = np.where(ipd <= -np.pi, ipd + 2.0 * np.pi, ipd)
    ild = 20.0 * np.log10(np.maximum(np.abs(x2), MAGNITUDE_FLOOR) / np.maximum(np.abs(x1), MAGNITUDE_FLOOR))
    return ipd, ild


def spatial_features(x1, x2):
    """Unnormalized (3, ...) stack of cos IPD, sin IPD and ILD."""
    ipd, ild = interchannel_features(x1, x2)
    return np.stack([np.cos(ipd), np.sin(ipd), ild])


@attrs.frozen(eq=False)
class FeatureStack:
    """Seven feature planes of shape (7, bins, frames)."""

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

    def channel(self, name):
        return self.data[FEATURE_CHANNELS.index(name)]


def encode_features(x1, x2, stats):
    """
    Build the feature stack of one (bins, frames) spectrogram pair.

    The spatial channels are normalized per frequency with ``stats``; the
    real and imaginary planes pass through unchanged.

    Raises:
        ShapeError: Channel shapes differ or stats have another bin count
    """
    x1, x2 = _check_pair(x1, x2)
    spatial = stats.normalize(spatial_features(x1, x2))
    return FeatureStack(np.concatenate([
        np.stack([x1.real, x1.imag, x2.real, x2.imag]),
        spatial,
    ]))


def mixture_spectra(buffer, frame_spec=DEFAULT_FRAME):
    """(X1, X2) of a two-channel mixture buffer, each (bins, frames)."""
    if buffer.channels != 2:
        raise ShapeError(f'mixtures have 2 channels, got {buffer.channels}')
    spectra = stft(buffer, frame_spec).data
    return spectra[0], spectra[1]


def signal_ratio(x, x_ref, frame_spec=DEFAULT_FRAME):
    """
    Frame-averaged complex ratio X/X_ref per frequency.

    Bins where |X_ref| is below the magnitude floor are left out of the
    average; a frequency with no usable frame gets 0.

    Raises:
        ShapeError: If the signals differ in length
    """
    x, x_ref = _check_pair(x, x_ref)
    spec = stft(np.stack([x, x_ref]), frame_spec).data
    num = spec[0] * np.conj(spec[1])
    den = (spec[1] * np.conj(spec[1])).real
    usable = den > MAGNITUDE_FLOOR ** 2
    ratio = np.where(usable, num / np.where(usable, den, 1.0), 0.0)
    counts = usable.sum(axis=1)
    return np.where(counts > 0, ratio.sum(axis=1) / np.maximum(counts, 1), 0.0)
