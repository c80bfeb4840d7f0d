"""
Microphone-separation experiment.

Two plain microphones a distance d apart hear the same source in a room;
the per-frequency signal ratio between them is measured for many random
placements. The spread (standard deviation across placements, in dB) of
that ratio shows how much the room alone changes the relation between
the two channels as the microphones move apart.
"""
import logging
import math

import attrs
import numpy as np
from django.conf import settings

from apps.common.exceptions import ArgumentError
from apps.common.random import make_rng
from apps.features.spatial import MAGNITUDE_FLOOR, signal_ratio
from apps.scenes.rooms import render_rir
from apps.signal_core.filters import convolve
from apps.signal_core.framing import DEFAULT_FRAME

logger = logging.getLogger(__name__)

DEFAULT_DISTANCES = (0.01, 0.08, 0.16)
WALL_MARGIN = 0.5
MIN_SOURCE_DISTANCE = 0.5


@attrs.frozen
class Placement:
    """Mic-pair centre, pair axis (radians, horizontal) and source position."""

    centre: tuple
    axis: float
    source: tuple

    def mic_pair(self, distance):
        half = distance / 2.0
        dx, dy = half * math.cos(self.axis), half * math.sin(self.axis)
        x, y, z = self.centre
        return (x - dx, y - dy, z), (x + dx, y + dy, z)


def random_placement(rng, room, max_distance):
    """
    Draw a placement where both mics and the source sit at least
    WALL_MARGIN from every wall.
    """
    lo = np.full(3, WALL_MARGIN)
    hi = np.asarray(room.dims) - WALL_MARGIN
    if np.any(hi - lo <= max_distance):
        raise ArgumentError(f'room {room.room_id} is too small for the placements')
    while True:
        centre = rng.uniform(lo + max_distance, hi - max_distance)
        source = rng.uniform(lo, hi)
        if np.linalg.norm(source - centre) >= MIN_SOURCE_DISTANCE:
            return Placement(tuple(centre), float(rng.uniform(0.0, math.pi)), tuple(source))


def placement_ratio_db(room, placement, distance, signal, frame_spec=DEFAULT_FRAME):
    """20*log10 |x / x_ref| per frequency for one placement and separation."""
    ref_pos, other_pos = placement.mic_pair(distance)
    x_ref = convolve(signal, render_rir(room, placement.source, ref_pos))
    x = convolve(signal, render_rir(room, placement.source, other_pos))
    length = min(len(x), len(x_ref))
    ratio = signal_ratio(x[:length], x_ref[:length], frame_spec)
    return 20.0 * np.log10(np.maximum(np.abs(ratio), MAGNITUDE_FLOOR))


@attrs.frozen(eq=False)
class SeparationResult:
    freqs: np.ndarray
    distances: tuple
    variation_db: np.ndarray

    def band_mean(self, f_lo, f_hi):
        band = (self.freqs >= f_lo) & (self.freqs <= f_hi)
        return {d: float(np.mean(curve[band])) for d, curve in zip(self.distances, self.variation_db)}

    def csv_rows(self):
        for i, f in enumerate(self.freqs):
            yield [float(f)] + [float(curve[i]) for curve in self.variation_db]


def mic_separation_experiment(rooms, n_placements, seed, distances=DEFAULT_DISTANCES, signal_seconds=1.0,
                              frame_spec=DEFAULT_FRAME):
    """
    Variation of the two-mic signal ratio across random placements.

    Every distance is measured on the same placements. Placement p uses room
    ``rooms[p % len(rooms)]`` and its own generator ``make_rng(seed, p)``.

    Returns:
        SeparationResult: (distances, bins) standard deviation in dB

    Raises:
        ArgumentError: Fewer than 2 rooms or 10 placements
    """
    if len(rooms) < 2:
        raise ArgumentError('the separation experiment needs at least 2 rooms')
    if n_placements < 10:
        raise ArgumentError('the separation experiment needs at least 10 placements')
    rate = settings.SIEVE_LAB['SAMPLE_RATE']
    distances = tuple(float(d) for d in distances)
    ratios = np.zeros((len(distances), n_placements, frame_spec.bins))
    for p in range(n_placements):
        rng = make_rng(seed, p)
        room = rooms[p % len(rooms)]
        placement = random_placement(rng, room, max(distances) / 2.0)
        signal = rng.standard_normal(int(round(signal_seconds * rate)))
        for k, distance in enumerate(distances):
            ratios[k, p] = placement_ratio_db(room, placement, distance, signal, frame_spec)
        logger.debug(f'Placement {p} in {room.room_id} done')
    freqs = np.fft.rfftfreq(frame_spec.window_len, d=1.0 / rate)
    logger.info(f'Separation experiment: {n_placements} placements, distances {distances}')
    return SeparationResult(freqs=freqs, distances=distances, variation_db=ratios.std(axis=1))
