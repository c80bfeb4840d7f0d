"""
FIR filtering, fractional delay and level helpers.
"""
import math

import numpy as np
from scipy import signal as sps

from apps.common.exceptions import ArgumentError, DegenerateSignalError, SizeError

SINC_TAPS = 31
SINC_HALF = SINC_TAPS // 2


def convolve(samples, fir):
    """
    Full linear convolution; output length is len(samples) + len(fir) - 1.

    scipy picks direct or FFT evaluation by size.
    """
    samples = np.asarray(samples, dtype=np.float64)
    fir = np.asarray(fir, dtype=np.float64)
    if samples.size == 0 or fir.size == 0:
        raise SizeError('convolve needs non-empty signal and filter')
    return sps.convolve(samples, fir, mode='full')


def sinc_kernel(frac):
    """
    31-tap Hann-windowed sinc centred on ``frac`` in [0, 1).

    Tap m (m = -15..15) weights input sample n - m when producing output n.
    """
    m = np.arange(-SINC_HALF, SINC_HALF + 1, dtype=np.float64)
    x = m - frac
    window = 0.5 * (1.0 + np.cos(np.pi * x / (SINC_HALF + 1)))
    kernel = np.sinc(x) * window
    return kernel / kernel.sum()


def _split_delay(delay_samples):
    if delay_samples < 0 or not math.isfinite(delay_samples):
        raise ArgumentError(f'delay must be finite and non-negative, got {delay_samples}')
    whole = int(math.floor(delay_samples))
    return whole, delay_samples - whole


def fractional_delay(samples, delay_samples):
    """
    Delay ``samples`` by a possibly fractional number of samples.

    The output keeps the input length (delay-line semantics: samples pushed
    past the end are dropped). Integer delays are exact shifts.
    """
    samples = np.asarray(samples, dtype=np.float64)
    whole, frac = _split_delay(delay_samples)
    out = np.zeros_like(samples)
    length = samples.shape[-1]
    if frac == 0.0:
        if whole < length:
            out[..., whole:] = samples[..., :length - whole]
        return out
    # centre tap at index SINC_HALF; full output index j maps to j - SINC_HALF
    full = sps.convolve(samples, sinc_kernel(frac), mode='full')
    start = SINC_HALF - whole
    lo = max(0, -start)
    if lo < length:
        out[..., lo:] = full[..., start + lo:start + length]
    return out


def add_fractional_impulse(response, delay_samples, gain):
    """
    Accumulate ``gain`` times a delayed unit impulse into ``response`` in place.

    Used to build room impulse responses arrival by arrival; taps that fall
    outside ``response`` are dropped.
    """
    whole, frac = _split_delay(delay_samples)
    if frac == 0.0:
        if whole < response.shape[-1]:
            response[whole] += gain
        return response
    kernel = sinc_kernel(frac)
    lo = whole - SINC_HALF
    first = max(0, lo)
    last = min(response.shape[-1], lo + SINC_TAPS)
    if first < last:
        response[first:last] += gain * kernel[first - lo:last - lo]
    return response


def rms(samples):
    samples = np.asarray(samples, dtype=np.float64)
    return float(np.sqrt(np.mean(samples ** 2))) if samples.size else 0.0


def scale_to_snr(target, interferer, snr_db):
    """
    Gain for ``interferer`` so that target-to-scaled-interferer ratio equals ``snr_db``.

    Raises:
        DegenerateSignalError: If either signal has zero RMS
    """
    rms_target = rms(target)
    rms_interferer = rms(interferer)
    if rms_interferer == 0.0:
        raise DegenerateSignalError('interferer has zero RMS')
    if rms_target == 0.0:
        raise DegenerateSignalError('target has zero RMS')
    return rms_target / (rms_interferer * 10.0 ** (snr_db / 20.0))


def peak_normalize(samples, peak=0.5):
    """Scale so that max |x| equals ``peak``; silence is returned unchanged."""
    samples = np.asarray(samples, dtype=np.float64)
    top = np.max(np.abs(samples)) if samples.size else 0.0
    return samples * (peak / top) if top > 0 else samples.copy()
