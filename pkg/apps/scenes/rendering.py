"""
Scene rendering.

The reference mic and the array hear plain image-source RIRs. The
microstructure mic hears every image through the bank filter of that
image's own device-frame arrival angle; the bank's bulk delay is removed
from the rendered output so all channels stay time-aligned.
"""
import logging

import attrs
import numpy as np

from apps.common.exceptions import SignalLookupError
from apps.scenes.rooms import arrival, image_sources, render_rir, rir_length
from apps.signal_core.filters import add_fractional_impulse, convolve

logger = logging.getLogger(__name__)


@attrs.frozen(eq=False)
class SourceRender:
    """One source rendered alone at unit gain."""

    ref: np.ndarray
    struct: np.ndarray
    array: np.ndarray = None


@attrs.frozen(eq=False)
class RenderedScene:
    ref_channel: np.ndarray
    struct_channel: np.ndarray
    array_channels: np.ndarray = None
    per_source_clean_ref: list = attrs.field(factory=list)

    def mixture(self):
        """(2, L) array: reference mic first, microstructure mic second."""
        return np.stack([self.ref_channel, self.struct_channel])


def struct_response(room, src_pos, rig, bank):
    """
    Composite impulse response at the microstructure mic.

    Arrivals are grouped by the bank filter they select; each group's sparse
    RIR is filtered once. The result still carries the bank latency.
    """
    images = image_sources(room, src_pos)
    mic = rig.struct_mic_pos
    length = rir_length(images, mic)
    groups = {}
    for position, gain in images:
        index = bank.nearest_index(rig.device_azimuth(position))
        sparse = groups.setdefault(index, np.zeros(length))
        delay, spread = arrival(position, mic)
        add_fractional_impulse(sparse, delay, gain * spread)
    total = None
    for index in sorted(groups):
        part = convolve(groups[index], bank.filters[index])
        total = part if total is None else total + part
    return total


def _fit(samples, length, offset=0):
    out = np.zeros(length)
    chunk = samples[offset:offset + length]
    out[:len(chunk)] = chunk
    return out


def render_source(room, rig, position, signal, bank, with_array=True):
    """Render one dry signal from ``position`` to every microphone of ``rig``."""
    length = len(signal)
    ref = _fit(convolve(signal, render_rir(room, position, rig.ref_mic_pos)), length)
    struct = _fit(convolve(signal, struct_response(room, position, rig, bank)), length, bank.latency)
    array = None
    if with_array and rig.array_positions:
        array = np.stack([
            _fit(convolve(signal, render_rir(room, position, mic)), length)
            for mic in rig.array_positions
        ])
    return SourceRender(ref=ref, struct=struct, array=array)


def _lookup(signals, signal_id):
    try:
        return np.asarray(signals[signal_id], dtype=np.float64)
    except KeyError as exc:
        raise SignalLookupError(f'signal {signal_id!r} is not available') from exc


def scene_length(scene, signals):
    return max((len(_lookup(signals, s.signal_id)) for s in scene.sources), default=0)


def render_sources(scene, bank, signals, with_array=True):
    """
    Render every source of ``scene`` alone, at unit gain.

    Signals shorter than the longest one are zero-padded at the end.

    Raises:
        SignalLookupError: If a source's signal_id is missing from ``signals``
    """
    length = scene_length(scene, signals)
    renders = []
    for source in scene.sources:
        signal = _fit(_lookup(signals, source.signal_id), length)
        renders.append(render_source(scene.room, scene.rig, source.position, signal, bank, with_array))
        logger.debug(f'Rendered {source.signal_id} ({source.role}) in {scene.room.room_id}')
    return renders


def combine(renders, gains):
    """Sum per-source renders with per-source gains into a RenderedScene."""
    ref = sum(g * r.ref for r, g in zip(renders, gains))
    struct = sum(g * r.struct for r, g in zip(renders, gains))
    array = None
    if renders and renders[0].array is not None:
        array = sum(g * r.array for r, g in zip(renders, gains))
    return RenderedScene(
        ref_channel=ref,
        struct_channel=struct,
        array_channels=array,
        per_source_clean_ref=[g * r.ref for r, g in zip(renders, gains)],
    )


def render_scene(scene, bank, signals, with_array=True):
    """
    Render ``scene`` with the microstructure ``bank``.

    Args:
        scene: SceneSpec; each source's ``gain`` scales its contribution
        bank: DirectionFilterBank applied per arrival at the microstructure mic
        signals: Mapping of signal_id to 24 kHz mono samples

    Returns:
        RenderedScene: channels trimmed to the longest source signal
    """
    renders = render_sources(scene, bank, signals, with_array)
    return combine(renders, [s.gain for s in scene.sources])
