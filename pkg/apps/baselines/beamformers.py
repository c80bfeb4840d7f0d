"""
Delay-and-sum and MVDR beamformers in the STFT domain.

Spectrograms are (M, bins, frames) in the lab's frame geometry. Weights are
(bins, M) and are applied as Y(f, t) = w(f)^H X(f, t).
"""
import logging

import numpy as np
from django.conf import settings

from apps.common.exceptions import ArgumentError, NumericalError, ShapeError
from apps.scenes.sectors import check_sector_count, sector_center, sectors_from_mask
from apps.signal_core.framing import DEFAULT_FRAME, istft, stft

from .steering import steering_vector

logger = logging.getLogger(__name__)

DIAGONAL_LOADING = 1e-3
METHODS = ('das', 'mvdr')
DISTORTIONLESS_FLOOR = 1e-12


def bin_frequencies(frame_spec=DEFAULT_FRAME):
    return np.fft.rfftfreq(frame_spec.window_len, d=1.0 / settings.SIEVE_LAB['SAMPLE_RATE'])


def _check_spec(spec, geometry, frame_spec):
    spec = np.asarray(spec)
    if spec.ndim != 3 or spec.shape[0] != geometry.count or spec.shape[1] != frame_spec.bins:
        raise ShapeError(
            f'spectrogram {spec.shape} does not match {geometry.count} mics x {frame_spec.bins} bins'
        )
    return spec


def apply_weights(weights, spec):
    return np.einsum('fm,mft->ft', weights.conj(), spec)


def das_weights(geometry, theta_deg, freqs):
    return steering_vector(geometry, theta_deg, freqs) / geometry.count


def delay_and_sum(spec, theta_deg, geometry, frame_spec=DEFAULT_FRAME):
    """
    Y = a^H X / M per (f, t).

    Raises:
        ShapeError: Channel count or bins do not match
    """
    spec = _check_spec(spec, geometry, frame_spec)
    return apply_weights(das_weights(geometry, theta_deg, bin_frequencies(frame_spec)), spec)


def spatial_covariance(spec):
    """Per-bin sample covariance (bins, M, M) of a (M, bins, frames) spectrogram."""
    return np.einsum('mft,nft->fmn', spec, spec.conj()) / spec.shape[-1]


def load_diagonal(covariance, loading=DIAGONAL_LOADING):
    """R + loading * tr(R) / M * I, per bin."""
    m = covariance.shape[-1]
    level = loading * np.trace(covariance, axis1=-2, axis2=-1).real / m
    return covariance + level[:, np.newaxis, np.newaxis] * np.eye(m)


def mvdr_weights(covariance, steering, loading=DIAGONAL_LOADING):
    """
    w = R^-1 a / (a^H R^-1 a) with diagonally loaded R.

    Args:
        covariance: (bins, M, M) noise covariance
        steering: (bins, M) steering vectors

    Raises:
        NumericalError: R is singular after loading
    """
    loaded = load_diagonal(covariance, loading)
    try:
        numerator = np.linalg.solve(loaded, steering[..., np.newaxis])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f'noise covariance is singular after loading: {exc}') from exc
    denominator = np.einsum('fm,fm->f', steering.conj(), numerator)
    if not np.all(np.isfinite(numerator)) or np.any(np.abs(denominator) < DISTORTIONLESS_FLOOR):
        raise NumericalError('noise covariance is singular after loading')
    return numerator / denominator[:, np.newaxis]


def noise_frame_count(noise_head_samples, frame_spec=DEFAULT_FRAME):
    """Number of leading frames that end inside the noise head."""
    return noise_head_samples // frame_spec.hop


def mvdr(spec, theta_deg, geometry, noise_frames, frame_spec=DEFAULT_FRAME, loading=DIAGONAL_LOADING):
    """
    MVDR beamformer with the noise covariance taken from ``noise_frames``.

    Args:
        spec: (M, bins, frames) spectrogram
        noise_frames: Count of leading noise-only frames, or their indices

    Raises:
        ArgumentError: Fewer noise frames than mics
        NumericalError: Singular covariance after loading
    """
    spec = _check_spec(spec, geometry, frame_spec)
    if np.ndim(noise_frames) == 0:
        noise = spec[:, :, :int(noise_frames)]
    else:
        noise = spec[:, :, np.asarray(noise_frames)]
    if noise.shape[-1] < geometry.count:
        raise ArgumentError(f'{noise.shape[-1]} noise frames cannot estimate a {geometry.count}-mic covariance')
    steering = steering_vector(geometry, theta_deg, bin_frequencies(frame_spec))
    return apply_weights(mvdr_weights(spatial_covariance(noise), steering, loading), spec)


def sector_steer(selected_sectors, n_sectors):
    """
    Look angle of every selected sector: the centre (i - 0.5) * 180 / n.

    Args:
        selected_sectors: Bitmask or iterable of 1-based sector indices

    Raises:
        ArgumentError: Empty selection
    """
    check_sector_count(n_sectors)
    if isinstance(selected_sectors, (int, np.integer)):
        sectors = sectors_from_mask(int(selected_sectors), n_sectors)
    else:
        sectors = sorted(set(selected_sectors))
    if not sectors:
        raise ArgumentError('sector selection is empty')
    return [sector_center(i, n_sectors) for i in sectors]


def beampattern(geometry, weights, f, angles_deg):
    """|w^H a(f, theta)| for every angle in ``angles_deg``."""
    steering = np.stack([steering_vector(geometry, theta, f) for theta in angles_deg])
    return np.abs(steering @ np.asarray(weights).conj())


def beamform_record(method, audio, geometry, selected_sectors, n_sectors, noise_head_samples,
                    frame_spec=DEFAULT_FRAME, loading=DIAGONAL_LOADING):
    """
    Beamform a (M, length) array recording toward every selected sector and
    sum the per-sector outputs.

    Returns:
        ndarray: (length,) output signal
    """
    if method not in METHODS:
        raise ArgumentError(f'method must be one of {METHODS}, got {method!r}')
    audio = np.asarray(audio, dtype=np.float64)
    spec = stft(audio, frame_spec).data
    total = np.zeros(spec.shape[1:], dtype=complex)
    for theta in sector_steer(selected_sectors, n_sectors):
        if method == 'das':
            total += delay_and_sum(spec, theta, geometry, frame_spec)
        else:
            frames = noise_frame_count(noise_head_samples, frame_spec)
            total += mvdr(spec, theta, geometry, frames, frame_spec, loading)
    logger.debug(f'{method} over {geometry.count} mics toward sectors {selected_sectors}')
    return istft(total[np.newaxis], frame_spec, audio.shape[-1]).data[0]
