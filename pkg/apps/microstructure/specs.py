"""
Geometry of the coded-hole cylinder.

A MicrostructureSpec is a cylinder of a given diameter with a set of surface
holes. Each hole is a directional port at some azimuth, reached through a
capillary tube (pure delay) and optionally a Helmholtz-style resonator.
Specs round-trip through a JSON document checked with jsonschema.
"""
import math

import attrs
import jsonschema

from apps.common.exceptions import ArgumentError, FormatError
from apps.common.files import read_json, write_json

MAX_HOLES = 16
DEFAULT_LEAKAGE_DB = -33.0


def _in_range(lo, hi, open_lo=False, open_hi=False):
    def check(instance, attribute, value):
        below = value <= lo if open_lo else value < lo
        above = value >= hi if open_hi else value > hi
        if below or above:
            raise ArgumentError(f'{attribute.name}={value} outside {"(" if open_lo else "["}'
                                f'{lo}, {hi}{")" if open_hi else "]"}')
    return check


@attrs.frozen
class Resonator:
    """Second-order peak at ``f0`` with quality ``q`` and peak gain ``gain_db``."""

    f0: float = attrs.field(converter=float, validator=_in_range(0.0, 12000.0, True, True))
    q: float = attrs.field(converter=float)
    gain_db: float = attrs.field(converter=float, default=8.0)

    @q.validator
    def _check_q(self, attribute, value):
        if value <= 0:
            raise ArgumentError(f'q must be positive, got {value}')


@attrs.frozen
class HoleSpec:
    azimuth_deg: float = attrs.field(converter=float, validator=_in_range(0.0, 360.0, False, True))
    tube_length: float = attrs.field(converter=float, default=0.0, validator=_in_range(0.0, 0.1))
    resonator: Resonator | None = attrs.field(default=None)


def _holes(value):
    return tuple(value)


@attrs.frozen
class MicrostructureSpec:
    """
    Parametric microstructure.

    ``wall_leakage_db`` may be ``-inf`` for an ideal wall. Zero holes is
    allowed and gives the angle-independent (flat) control structure.
    ``body_shadowing`` sharpens each port lobe with cylinder size.
    """

    diameter: float = attrs.field(converter=float, validator=_in_range(0.005, 0.05))
    holes: tuple = attrs.field(converter=_holes, factory=tuple)
    wall_leakage_db: float = attrs.field(converter=float, default=DEFAULT_LEAKAGE_DB)
    directivity_exponent: float = attrs.field(converter=float, default=2.0)
    body_shadowing: bool = attrs.field(default=True)
    name: str = attrs.field(default='custom')

    @holes.validator
    def _check_holes(self, attribute, value):
        if len(value) > MAX_HOLES:
            raise ArgumentError(f'at most {MAX_HOLES} holes, got {len(value)}')
        azimuths = [h.azimuth_deg for h in value]
        if len(set(azimuths)) != len(azimuths):
            raise ArgumentError(f'hole azimuths must be distinct: {azimuths}')

    @directivity_exponent.validator
    def _check_exponent(self, attribute, value):
        if value <= 0:
            raise ArgumentError(f'directivity_exponent must be positive, got {value}')

    @property
    def leakage(self):
        return 10.0 ** (self.wall_leakage_db / 20.0)

    @property
    def radius(self):
        return self.diameter / 2.0


SPEC_SCHEMA = {
    'type': 'object',
    'required': ['diameter', 'holes'],
    'additionalProperties': False,
    'properties': {
        'name': {'type': 'string'},
        'diameter': {'type': 'number'},
        'wall_leakage_db': {'type': ['number', 'null']},
        'directivity_exponent': {'type': 'number'},
        'body_shadowing': {'type': 'boolean'},
        'holes': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['azimuth_deg'],
                'additionalProperties': False,
                'properties': {
                    'azimuth_deg': {'type': 'number'},
                    'tube_length': {'type': 'number'},
                    'resonator': {
                        'type': ['object', 'null'],
                        'required': ['f0', 'q', 'gain_db'],
                        'properties': {
                            'f0': {'type': 'number'},
                            'q': {'type': 'number'},
                            'gain_db': {'type': 'number'},
                        },
                    },
                },
            },
        },
    },
}


def spec_from_document(document):
    """
    Build a spec from its JSON document.

    ``wall_leakage_db: null`` stands for an ideal (-inf dB) wall.
    """
    try:
        jsonschema.validate(document, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = '.'.join(str(p) for p in exc.absolute_path) or '<root>'
        raise FormatError(f'{path}: {exc.message}') from exc

    holes = []
    for hole in document['holes']:
        resonator = hole.get('resonator')
        holes.append(HoleSpec(
            azimuth_deg=hole['azimuth_deg'],
            tube_length=hole.get('tube_length', 0.0),
            resonator=Resonator(**resonator) if resonator else None,
        ))
    leakage = document.get('wall_leakage_db', DEFAULT_LEAKAGE_DB)
    return MicrostructureSpec(
        diameter=document['diameter'],
        holes=holes,
        wall_leakage_db=-math.inf if leakage is None else leakage,
        directivity_exponent=document.get('directivity_exponent', 2.0),
        body_shadowing=document.get('body_shadowing', True),
        name=document.get('name', 'custom'),
    )


def spec_to_document(spec):
    leakage = None if math.isinf(spec.wall_leakage_db) else spec.wall_leakage_db
    return {
        'name': spec.name,
        'diameter': spec.diameter,
        'wall_leakage_db': leakage,
        'directivity_exponent': spec.directivity_exponent,
        'body_shadowing': spec.body_shadowing,
        'holes': [
            {
                'azimuth_deg': h.azimuth_deg,
                'tube_length': h.tube_length,
                'resonator': attrs.asdict(h.resonator) if h.resonator else None,
            }
            for h in spec.holes
        ],
    }


def load_spec(path):
    return spec_from_document(read_json(path))


def save_spec(spec, path):
    return write_json(path, spec_to_document(spec))


# Presets

DEFAULT_AZIMUTHS = (10.0, 35.0, 60.0, 100.0, 140.0, 170.0)
DEFAULT_TUBES = (0.005, 0.012, 0.019, 0.026, 0.033, 0.040)
DEFAULT_F0 = (1400.0, 2000.0, 2700.0, 3400.0, 4300.0, 5200.0)

# the four extra ports of the ten-hole predecessor, all inside 60-180 degrees
TEN_HOLE_EXTRA = (
    (80.0, 0.008, 1700.0),
    (120.0, 0.016, 2400.0),
    (155.0, 0.030, 3800.0),
    (178.0, 0.045, 4800.0),
)


def default_spec():
    """Six-hole, 20 mm design shipped as the lab default."""
    holes = [
        HoleSpec(azimuth, tube, Resonator(f0=f0, q=6.0, gain_db=8.0))
        for azimuth, tube, f0 in zip(DEFAULT_AZIMUTHS, DEFAULT_TUBES, DEFAULT_F0)
    ]
    return MicrostructureSpec(diameter=0.020, holes=holes, name='default')


def ten_hole_spec():
    base = default_spec()
    extra = [
        HoleSpec(azimuth, tube, Resonator(f0=f0, q=6.0, gain_db=8.0))
        for azimuth, tube, f0 in TEN_HOLE_EXTRA
    ]
    holes = sorted(base.holes + tuple(extra), key=lambda h: h.azimuth_deg)
    return attrs.evolve(base, holes=holes, name='ten_hole')


def flat_spec(wall_leakage_db=DEFAULT_LEAKAGE_DB):
    """No holes: leakage only, identical response at every angle."""
    return MicrostructureSpec(diameter=0.020, holes=(), wall_leakage_db=wall_leakage_db, name='flat')


def with_diameter(spec, diameter):
    return attrs.evolve(spec, diameter=diameter, name=f'{spec.name}_{round(diameter * 1000)}mm')


PRESETS = {
    'default': default_spec,
    'ten_hole': ten_hole_spec,
    'flat': flat_spec,
}


def preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ArgumentError(f'unknown preset {name!r}; choose from {sorted(PRESETS)}') from None
