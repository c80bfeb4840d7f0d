"""
Shoebox rooms and the image-source method.

Images are indexed by integer lattice coordinates (i, j, k); the image of
a source at x along an axis of length L is ``i*L + x`` for even i and
``i*L + L - x`` for odd i, having undergone |i| reflections on that axis.
Reflection order is |i| + |j| + |k|.
"""
import itertools
import math

import attrs
import numpy as np
from django.conf import settings

from apps.common.exceptions import ArgumentError
from apps.signal_core.filters import SINC_HALF, add_fractional_impulse


def _as_point(value):
    point = tuple(float(v) for v in value)
    if len(point) != 3:
        raise ArgumentError(f'positions are (x, y, z), got {value!r}')
    return point


@attrs.frozen
class RoomSpec:
    """Shoebox room with one absorption coefficient on all six walls."""

    dims: tuple = attrs.field(converter=_as_point)
    absorption: float = attrs.field(converter=float)
    max_order: int = attrs.field(default=3)
    room_id: str = attrs.field(default='room')

    @dims.validator
    def _check_dims(self, attribute, value):
        if any(not 2.0 <= d <= 20.0 for d in value):
            raise ArgumentError(f'room dims must each lie in [2, 20] m, got {value}')

    @absorption.validator
    def _check_absorption(self, attribute, value):
        if not 0.0 < value <= 1.0:
            raise ArgumentError(f'absorption must lie in (0, 1], got {value}')

    @max_order.validator
    def _check_order(self, attribute, value):
        if not 0 <= value <= 6:
            raise ArgumentError(f'max_order must lie in [0, 6], got {value}')

    @property
    def reflection(self):
        return math.sqrt(1.0 - self.absorption)

    @property
    def centre(self):
        return tuple(d / 2.0 for d in self.dims)

    def contains(self, point):
        return all(0.0 < p < d for p, d in zip(point, self.dims))


def lattice(max_order):
    """All (i, j, k) with |i| + |j| + |k| <= max_order, ordered by order then index."""
    span = range(-max_order, max_order + 1)
    points = [p for p in itertools.product(span, span, span) if sum(map(abs, p)) <= max_order]
    return sorted(points, key=lambda p: (sum(map(abs, p)), p))


def image_sources(room, src_pos, max_order=None):
    """
    Enumerate image sources of ``src_pos`` up to ``max_order`` reflections.

    Returns:
        list[tuple[ndarray, float]]: (virtual position, reflection gain)

    Raises:
        ArgumentError: If the source is not strictly inside the room
    """
    src = _as_point(src_pos)
    if not room.contains(src):
        raise ArgumentError(f'source {src} is outside room {room.dims}')
    order = room.max_order if max_order is None else max_order
    images = []
    for index in lattice(order):
        position = np.array([
            n * length + (x if n % 2 == 0 else length - x)
            for n, x, length in zip(index, src, room.dims)
        ])
        images.append((position, room.reflection ** sum(map(abs, index))))
    return images


def arrival(position, mic_pos, speed_of_sound=None, rate=None):
    """Delay in samples and spherical-spreading amplitude of one path."""
    c = speed_of_sound or settings.SIEVE_LAB['SPEED_OF_SOUND']
    fs = rate or settings.SIEVE_LAB['SAMPLE_RATE']
    distance = float(np.linalg.norm(np.asarray(position) - np.asarray(mic_pos)))
    # quantized so that exact-integer geometries land on integer delays
    delay = round(distance / c * fs, 9)
    return delay, 1.0 / (4.0 * math.pi * max(distance, 1e-3))


def rir_length(images, mic_pos):
    longest = max(arrival(position, mic_pos)[0] for position, _ in images)
    return int(math.ceil(longest)) + SINC_HALF + 1


def render_rir(room, src_pos, mic_pos, max_order=None):
    """
    Room impulse response from ``src_pos`` to ``mic_pos``.

    Each image adds gain/(4*pi*d) at fractional delay d/c*fs.
    """
    images = image_sources(room, src_pos, max_order)
    response = np.zeros(rir_length(images, mic_pos))
    for position, gain in images:
        delay, spread = arrival(position, mic_pos)
        add_fractional_impulse(response, delay, gain * spread)
    return response


def _as_points(value):
    return tuple(_as_point(p) for p in value)


def horizontal_azimuth(origin, point):
    """Azimuth in degrees of ``point`` seen from ``origin``, in [0, 360)."""
    dx = point[0] - origin[0]
    dy = point[1] - origin[1]
    return math.degrees(math.atan2(dy, dx)) % 360.0


@attrs.frozen
class ReceiverRig:
    """
    Reference microphone, microstructure microphone and optional array.

    ``orientation_deg`` is the world azimuth of the device's 0 degree
    direction (the edge of sector 1).
    """

    ref_mic_pos: tuple = attrs.field(converter=_as_point)
    struct_mic_pos: tuple = attrs.field(converter=_as_point)
    orientation_deg: float = attrs.field(default=0.0, converter=float)
    array_positions: tuple = attrs.field(default=(), converter=_as_points)
    rig_id: str = attrs.field(default='rig')
    max_separation: float = attrs.field(default=0.02, converter=float)

    def __attrs_post_init__(self):
        if self.separation > self.max_separation + 1e-12:
            raise ArgumentError(
                f'reference and microstructure mics are {self.separation:.4f} m apart, '
                f'limit {self.max_separation} m'
            )

    @property
    def separation(self):
        return math.dist(self.ref_mic_pos, self.struct_mic_pos)

    @property
    def positions(self):
        return (self.ref_mic_pos, self.struct_mic_pos, *self.array_positions)

    def device_azimuth(self, point):
        """Azimuth of ``point`` in the device frame, measured at the microstructure mic."""
        return (horizontal_azimuth(self.struct_mic_pos, point) - self.orientation_deg) % 360.0

    def world_point(self, azimuth_deg, distance, height=None):
        """Point at a device-frame azimuth and horizontal distance from the microstructure mic."""
        heading = math.radians(azimuth_deg + self.orientation_deg)
        x, y, z = self.struct_mic_pos
        return (x + distance * math.cos(heading), y + distance * math.sin(heading),
                z if height is None else height)

    def array_geometry(self):
        """Array positions relative to the microstructure mic, rotated into the device frame."""
        turn = math.radians(-self.orientation_deg)
        cos_t, sin_t = math.cos(turn), math.sin(turn)
        geometry = []
        for x, y, z in self.array_positions:
            dx, dy, dz = x - self.struct_mic_pos[0], y - self.struct_mic_pos[1], z - self.struct_mic_pos[2]
            geometry.append((dx * cos_t - dy * sin_t, dx * sin_t + dy * cos_t, dz))
        return geometry


@attrs.frozen
class RigTemplate:
    """
    Rig layout relative to its microstructure mic, placed at a room's centre.
    """

    rig_id: str = 'rig'
    ref_offset: tuple = attrs.field(default=(0.01, 0.0, 0.0), converter=_as_point)
    orientation_deg: float = attrs.field(default=0.0, converter=float)
    array_count: int = 4
    array_radius: float = 0.05
    height: float = 1.2

    def place(self, room):
        """
        Raises:
            ArgumentError: If the rig does not fit inside the room
        """
        cx, cy, _ = room.centre
        origin = (cx, cy, self.height)
        ref = tuple(o + d for o, d in zip(origin, self.ref_offset))
        array = []
        for m in range(self.array_count):
            heading = math.radians(self.orientation_deg + 360.0 * m / self.array_count)
            array.append((cx + self.array_radius * math.cos(heading),
                          cy + self.array_radius * math.sin(heading), self.height))
        for point in (origin, ref, *array):
            if not room.contains(point):
                raise ArgumentError(f'rig {self.rig_id} does not fit in room {room.room_id}')
        return ReceiverRig(ref_mic_pos=ref, struct_mic_pos=origin, orientation_deg=self.orientation_deg,
                           array_positions=array, rig_id=self.rig_id)


ROLES = ('target', 'interferer')


@attrs.frozen
class SourcePlacement:
    signal_id: str
    position: tuple = attrs.field(converter=_as_point)
    role: str = attrs.field(default='target', validator=attrs.validators.in_(ROLES))
    gain: float = attrs.field(default=1.0, converter=float)


@attrs.frozen
class SceneSpec:
    room: RoomSpec
    rig: ReceiverRig
    sources: tuple = attrs.field(converter=tuple)
    seed: int = 0

    def __attrs_post_init__(self):
        for point in self.rig.positions:
            if not self.room.contains(point):
                raise ArgumentError(f'microphone {point} is outside room {self.room.room_id}')
        for source in self.sources:
            if not self.room.contains(source.position):
                raise ArgumentError(f'source {source.signal_id} is outside room {self.room.room_id}')
