"""
Spatial-diversity metrics and design sweeps.
"""
import logging

import attrs
import numpy as np
from django.conf import settings
from scipy.spatial.distance import pdist, squareform

from apps.common.exceptions import ArgumentError

from .response import DEFAULT_GRID, DEFAULT_TAPS, realize_bank

logger = logging.getLogger(__name__)


def spatial_diversity(bank, freq_grid):
    """
    Population variance over angles of |M_theta(f)| at each frequency.

    Variance is taken about the first angle's magnitude so that identical
    filters give exactly zero.
    """
    magnitude = np.abs(bank.response_at(freq_grid))
    return np.var(magnitude - magnitude[0], axis=0)


def band_bins(taps, f_lo, f_hi):
    nyquist = settings.SIEVE_LAB['SAMPLE_RATE'] / 2
    if not 0 <= f_lo < f_hi <= nyquist:
        raise ArgumentError(f'band [{f_lo}, {f_hi}] must satisfy 0 <= lo < hi <= {nyquist}')
    freqs = np.fft.rfftfreq(taps, d=1.0 / settings.SIEVE_LAB['SAMPLE_RATE'])
    return freqs[(freqs >= f_lo) & (freqs <= f_hi)]


def pairwise_distance_map(bank, f_lo, f_hi):
    """
    L2 distance between magnitude responses restricted to [f_lo, f_hi].

    Returns:
        ndarray: symmetric (angles, angles) matrix with zero diagonal
    """
    freqs = band_bins(bank.taps, f_lo, f_hi)
    magnitude = np.abs(bank.response_at(freqs))
    if len(bank) == 1:
        return np.zeros((1, 1))
    return squareform(pdist(magnitude, metric='euclidean'))


@attrs.frozen
class DesignSummary:
    name: str
    mean_diversity: float
    mean_distance: float
    rank: int = 0

    def as_dict(self):
        return attrs.asdict(self)


def summarize(bank, freq_band):
    f_lo, f_hi = freq_band
    freqs = band_bins(bank.taps, f_lo, f_hi)
    diversity = spatial_diversity(bank, freqs)
    distances = pairwise_distance_map(bank, f_lo, f_hi)
    n = len(bank)
    off_diagonal = distances.sum() / (n * (n - 1)) if n > 1 else 0.0
    return DesignSummary(
        name=bank.spec.name,
        mean_diversity=float(np.mean(diversity)),
        mean_distance=float(off_diagonal),
    )


def design_sweep(specs, freq_band=(1000.0, 4000.0), angle_grid=DEFAULT_GRID, taps=DEFAULT_TAPS,
                 banks=None):
    """
    Rank candidate designs by band-mean spatial diversity.

    Args:
        specs: MicrostructureSpecs to compare
        freq_band: (f_lo, f_hi) in Hz
        banks: Optional dict collecting the realized bank of each spec by name

    Returns:
        list[DesignSummary]: sorted descending by mean diversity, ties kept
        in input order

    Raises:
        ArgumentError: Fewer than two specs
    """
    specs = list(specs)
    if len(specs) < 2:
        raise ArgumentError(f'design sweep compares at least two specs, got {len(specs)}')
    summaries = []
    for spec in specs:
        bank = realize_bank(spec, angle_grid, taps)
        if banks is not None:
            banks[spec.name] = bank
        summary = summarize(bank, freq_band)
        logger.info(f'Design {summary.name}: mean V={summary.mean_diversity:.6g}, '
                    f'mean D={summary.mean_distance:.6g}')
        summaries.append(summary)
    ranked = sorted(summaries, key=lambda s: -s.mean_diversity)
    return [attrs.evolve(s, rank=i + 1) for i, s in enumerate(ranked)]
