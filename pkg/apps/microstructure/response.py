"""
Direction-dependent response M_theta(f) of a microstructure.

The response is a multipath sum: a zero-delay wall leakage path plus, per
hole, a cosine-lobe directional gain, a resonator peak and the capillary
tube delay. FIRs are the linear-phase, Tukey-windowed inverse real DFT of
the sampled response, so every filter in a bank carries a bulk delay of
``taps // 2`` samples.
"""
import logging

import attrs
import numpy as np
from django.conf import settings
from scipy.signal import windows

from apps.common.exceptions import ArgumentError

logger = logging.getLogger(__name__)

SIDE_LOBE_FLOOR = 0.05
DEFAULT_TAPS = 256
DEFAULT_GRID = tuple(float(a) for a in range(0, 181))


def _lab(name):
    return settings.SIEVE_LAB[name]


def fold_angle(theta_deg):
    """Map an azimuth in [0, 360) onto the characterized semicircle [0, 180]."""
    if not 0.0 <= theta_deg < 360.0:
        raise ArgumentError(f'theta must lie in [0, 360), got {theta_deg}')
    return 360.0 - theta_deg if theta_deg > 180.0 else theta_deg


def resonator_response(resonator, freqs):
    """
    Analog peaking section evaluated on the jw axis.

    Unity far from ``f0``; 10**(gain_db/20) at ``f0``.
    """
    if resonator is None:
        return np.ones(len(freqs), dtype=complex)
    amplitude = 10.0 ** (resonator.gain_db / 40.0)
    w0 = 2 * np.pi * resonator.f0
    s = 1j * 2 * np.pi * np.asarray(freqs, dtype=np.float64)
    numerator = s ** 2 + s * (amplitude / resonator.q) * w0 + w0 ** 2
    denominator = s ** 2 + s * w0 / (amplitude * resonator.q) + w0 ** 2
    return numerator / denominator


def lobe_gain(spec, hole, theta_deg, freqs, speed_of_sound):
    """Cosine-lobe port gain, sharpened by body shadowing when enabled."""
    cosine = max(0.0, np.cos(np.deg2rad(theta_deg - hole.azimuth_deg)))
    exponent = np.full(len(freqs), spec.directivity_exponent)
    if spec.body_shadowing:
        k = 2 * np.pi * np.asarray(freqs, dtype=np.float64) / speed_of_sound
        exponent = exponent * (1.0 + k * spec.radius)
    return cosine ** exponent + SIDE_LOBE_FLOOR


def frequency_response(spec, theta_deg, freqs, speed_of_sound=None):
    """
    Complex M_theta(f) on an arbitrary frequency grid.

    Args:
        spec: MicrostructureSpec
        theta_deg: Arrival azimuth in [0, 360); folded to [0, 180]
        freqs: Frequencies in Hz

    Returns:
        ndarray: complex response, one value per frequency
    """
    c = speed_of_sound or _lab('SPEED_OF_SOUND')
    theta = fold_angle(theta_deg)
    freqs = np.asarray(freqs, dtype=np.float64)
    response = np.full(len(freqs), spec.leakage, dtype=complex)
    for hole in spec.holes:
        delay = hole.tube_length / c
        response += (
            lobe_gain(spec, hole, theta, freqs, c)
            * resonator_response(hole.resonator, freqs)
            * np.exp(-2j * np.pi * freqs * delay)
        )
    return response


def _check_taps(taps):
    if taps < 64 or taps & (taps - 1):
        raise ArgumentError(f'taps must be a power of two >= 64, got {taps}')


def direction_filter(spec, theta_deg, taps=DEFAULT_TAPS):
    """
    FIR realization of M_theta with ``taps`` coefficients.

    The sampled response is shifted to the centre tap and windowed with a
    Tukey(0.5) window whose flat top spans the middle half of the filter.
    """
    _check_taps(taps)
    rate = _lab('SAMPLE_RATE')
    freqs = np.fft.rfftfreq(taps, d=1.0 / rate)
    centre = taps // 2
    shifted = frequency_response(spec, theta_deg, freqs) * np.exp(-2j * np.pi * freqs * centre / rate)
    fir = np.fft.irfft(shifted, n=taps)
    return fir * windows.tukey(taps, alpha=0.5, sym=False)


@attrs.frozen(eq=False)
class DirectionFilterBank:
    """Per-angle FIRs of one microstructure over a sorted angle grid."""

    spec: object
    angle_grid: tuple = attrs.field(converter=tuple)
    taps: int
    filters: np.ndarray

    @property
    def latency(self):
        """Bulk delay in samples shared by every filter."""
        return self.taps // 2

    def __len__(self):
        return len(self.angle_grid)

    def nearest_index(self, theta_deg):
        """Grid index closest to the folded ``theta_deg``."""
        theta = fold_angle(theta_deg % 360.0)
        return int(np.argmin(np.abs(np.asarray(self.angle_grid) - theta)))

    def nearest(self, theta_deg):
        """Filter for the grid angle closest to the folded ``theta_deg``."""
        return self.filters[self.nearest_index(theta_deg)]

    def response_at(self, freqs):
        """
        DTFT of every filter at ``freqs``.

        Returns:
            ndarray: (angles, freqs) complex
        """
        rate = _lab('SAMPLE_RATE')
        n = np.arange(self.taps)
        kernel = np.exp(-2j * np.pi * np.outer(n, np.asarray(freqs, dtype=np.float64)) / rate)
        return self.filters @ kernel

    def csv_rows(self):
        for angle, fir in zip(self.angle_grid, self.filters):
            for tap, value in enumerate(fir):
                yield angle, tap, float(value)


def uniform_grid(step_deg=1.0):
    """Grid 0..180 degrees inclusive at ``step_deg``."""
    return tuple(float(a) for a in np.arange(0.0, 180.0 + 1e-9, step_deg))


def realize_bank(spec, angle_grid=DEFAULT_GRID, taps=DEFAULT_TAPS):
    """
    Build the filter bank of ``spec`` over ``angle_grid``.

    Raises:
        ArgumentError: Empty or unsorted grid, bad angle or tap count
    """
    grid = tuple(float(a) for a in angle_grid)
    if not grid:
        raise ArgumentError('angle grid is empty')
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ArgumentError('angle grid must be sorted')
    filters = np.stack([direction_filter(spec, theta, taps) for theta in grid])
    logger.debug(f'Realized bank {spec.name}: {len(grid)} angles x {taps} taps')
    return DirectionFilterBank(spec=spec, angle_grid=grid, taps=taps, filters=filters)
