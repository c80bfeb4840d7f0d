"""
Mixture dataset generation and the JSON-lines mixture manifest.

For every combination of k selected sectors (k = 1..max_targets) and every
clip slot, one record is generated: a target source in each selected
sector, 1-2 interferers in distinct unselected sectors, SNRs drawn
uniformly and set on the reference-mic renders, and the reference-mic
ground truth of the targets. Each mixture opens with an interferer-only
noise head. Record i draws from its own generator seeded with
``derive_seed(seed, i)``, so records do not depend on generation order.
"""
import itertools
import logging
import math
from pathlib import Path

import attrs
import jsonschema
import numpy as np

from apps.common.exceptions import ArgumentError, FormatError, ResourceError
from apps.common.files import read_jsonl, write_jsonl
from apps.common.random import PRNG_ALGORITHM, derive_seed, make_rng
from apps.scenes.rendering import combine, render_sources
from apps.scenes.rooms import SceneSpec, SourcePlacement
from apps.scenes.sectors import check_sector_count, mask_from_sectors, sector_bounds, sector_of
from apps.signal_core.audio import SAMPLE_RATE, AudioBuffer, wav_read, wav_write
from apps.signal_core.filters import scale_to_snr

logger = logging.getLogger(__name__)

ANGLE_MARGIN_DEG = 0.5
WALL_CLEARANCE = 0.1
PEAK_LIMIT = 0.99


def _pair(value):
    lo, hi = (float(v) for v in value)
    if hi < lo:
        raise ArgumentError(f'range must be (low, high), got {value}')
    return lo, hi


@attrs.frozen
class MixtureConfig:
    n_sectors: int = attrs.field(default=6)
    max_targets: int = attrs.field(default=3)
    snr_range_db: tuple = attrs.field(default=(-5.0, 5.0), converter=_pair)
    clips_per_combo: int = attrs.field(default=1)
    clip_seconds: float = 3.0
    noise_head_seconds: float = 0.5
    interferer_range: tuple = attrs.field(default=(1, 2), converter=lambda v: tuple(int(x) for x in v))
    distance_range: tuple = attrs.field(default=(0.5, 2.5), converter=_pair)
    no_target_rate: float = 0.1
    with_array: bool = True

    @n_sectors.validator
    def _check_sectors(self, attribute, value):
        check_sector_count(value)

    @max_targets.validator
    def _check_targets(self, attribute, value):
        if not 1 <= value <= 3:
            raise ArgumentError(f'max_targets must lie in [1, 3], got {value}')

    @interferer_range.validator
    def _check_interferers(self, attribute, value):
        if len(value) != 2 or not 1 <= value[0] <= value[1]:
            raise ArgumentError(f'interferer_range must be (low, high) with 1 <= low <= high, got {value}')

    @clips_per_combo.validator
    def _check_clips(self, attribute, value):
        if value < 1:
            raise ArgumentError('clips_per_combo must be at least 1')

    @property
    def length(self):
        return int(round(self.clip_seconds * SAMPLE_RATE))

    @property
    def head(self):
        return int(round(self.noise_head_seconds * SAMPLE_RATE))


def sector_combinations(n_sectors, max_targets):
    """All sector selections, by size then lexicographically."""
    sectors = range(1, n_sectors + 1)
    return [combo for k in range(1, max_targets + 1) for combo in itertools.combinations(sectors, k)]


SOURCE_SCHEMA = {
    'type': 'object',
    'required': ['signal_id', 'role', 'angle_deg', 'sector', 'snr_db', 'distance_m'],
    'properties': {
        'signal_id': {'type': 'string'},
        'role': {'enum': ['target', 'interferer']},
        'angle_deg': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 180},
        'sector': {'type': 'integer', 'minimum': 1},
        'snr_db': {'type': ['number', 'null']},
        'distance_m': {'type': 'number', 'exclusiveMinimum': 0},
    },
}

RECORD_SCHEMA = {
    'type': 'object',
    'required': [
        'id', 'mixture_wav_path', 'array_wav_path', 'target_wav_path', 'n_sectors',
        'selected_sectors', 'per_source', 'room_id', 'rig_id', 'seed',
        'target_present', 'noise_head_samples', 'length_samples', 'prng_algorithm',
    ],
    'properties': {
        'id': {'type': 'string', 'minLength': 1},
        'mixture_wav_path': {'type': 'string'},
        'array_wav_path': {'type': ['string', 'null']},
        'array_geometry': {
            'type': ['array', 'null'],
            'items': {'type': 'array', 'items': {'type': 'number'}, 'minItems': 3, 'maxItems': 3},
        },
        'target_wav_path': {'type': 'string'},
        'n_sectors': {'enum': [6, 9]},
        'selected_sectors': {'type': 'integer', 'minimum': 1},
        'per_source': {'type': 'array', 'items': SOURCE_SCHEMA, 'minItems': 1},
        'room_id': {'type': 'string'},
        'rig_id': {'type': 'string'},
        'microstructure': {'type': 'string'},
        'seed': {'type': 'integer', 'minimum': 0},
        'target_present': {'type': 'boolean'},
        'noise_head_samples': {'type': 'integer', 'minimum': 0},
        'length_samples': {'type': 'integer', 'minimum': 1},
        'prng_algorithm': {'type': 'string'},
    },
}


def validate_record(record):
    """
    Check a manifest record's schema and sector invariants.

    Raises:
        FormatError: On the first violation
    """
    try:
        jsonschema.validate(record, RECORD_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = '.'.join(str(p) for p in exc.absolute_path) or 'record'
        record_id = record.get('id', '?') if isinstance(record, dict) else '?'
        raise FormatError(f'{record_id}: {where}: {exc.message}') from exc
    n_sectors = record['n_sectors']
    selected = record['selected_sectors']
    if selected >> n_sectors:
        raise FormatError(f"{record['id']}: selection {selected:#b} exceeds {n_sectors} sectors")
    for source in record['per_source']:
        sector = source['sector']
        if sector != sector_of(source['angle_deg'], n_sectors):
            raise FormatError(f"{record['id']}: {source['signal_id']} angle does not lie in sector {sector}")
        inside = bool(selected >> (sector - 1) & 1)
        if source['role'] == 'target' and not inside:
            raise FormatError(f"{record['id']}: target {source['signal_id']} outside the selected sectors")
        if source['role'] == 'interferer' and inside:
            raise FormatError(f"{record['id']}: interferer {source['signal_id']} inside the selected sectors")
    has_target = any(s['role'] == 'target' for s in record['per_source'])
    if has_target != record['target_present']:
        raise FormatError(f"{record['id']}: target_present disagrees with per_source")
    return record


@attrs.frozen
class Manifest:
    """Validated records of one manifest file, sorted by id."""

    path: Path = attrs.field(converter=Path)
    records: tuple = attrs.field(converter=tuple)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def resolve(self, relative):
        return self.path.parent / relative

    def load_mixture(self, record):
        return wav_read(self.resolve(record['mixture_wav_path']))

    def load_target(self, record):
        return wav_read(self.resolve(record['target_wav_path']))

    def load_array(self, record):
        """
        Raises:
            ResourceError: If the record carries no array recording
        """
        if not record.get('array_wav_path'):
            raise ResourceError(f"{record['id']} has no array recording")
        return wav_read(self.resolve(record['array_wav_path']))


def read_manifest(path):
    """
    Raises:
        FormatError: If any record is invalid
        ResourceError: If the manifest holds no records
    """
    path = Path(path)
    try:
        records = read_jsonl(path)
    except ValueError as exc:
        raise FormatError(f'{path}: {exc}') from exc
    if not records:
        raise ResourceError(f'manifest {path} is empty')
    for record in records:
        validate_record(record)
    return Manifest(path=path, records=sorted(records, key=lambda r: r['id']))


def write_manifest(path, records):
    ordered = sorted(records, key=lambda r: r['id'])
    for record in ordered:
        validate_record(record)
    return write_jsonl(path, ordered)


def wall_reach(room, rig, azimuth_deg):
    """Horizontal distance from the microstructure mic to the nearest wall along a device azimuth."""
    heading = math.radians(azimuth_deg + rig.orientation_deg)
    reach = math.inf
    for axis, step in enumerate((math.cos(heading), math.sin(heading))):
        position = rig.struct_mic_pos[axis]
        if step > 1e-12:
            reach = min(reach, (room.dims[axis] - position) / step)
        elif step < -1e-12:
            reach = min(reach, position / -step)
    return reach


def _draw_source(rng, room, rig, sector, config):
    lo, hi = sector_bounds(sector, config.n_sectors)
    angle = float(rng.uniform(lo + ANGLE_MARGIN_DEG, hi - ANGLE_MARGIN_DEG))
    d_lo, d_hi = config.distance_range
    d_hi = min(d_hi, wall_reach(room, rig, angle) - WALL_CLEARANCE)
    if d_hi < d_lo:
        raise ArgumentError(f'room {room.room_id} cannot hold a source {d_lo} m from the rig')
    distance = float(rng.uniform(d_lo, d_hi))
    return angle, distance, rig.world_point(angle, distance)


def _segment(rng, clip, length, lead):
    """``length`` samples: ``lead`` zeros followed by a random excerpt of ``clip``."""
    needed = length - lead
    if len(clip) < needed:
        raise ResourceError(f'clip of {len(clip)} samples is shorter than {needed}')
    offset = int(rng.integers(0, len(clip) - needed + 1))
    out = np.zeros(length)
    out[lead:] = clip[offset:offset + needed]
    return out


def plan_record(index, combo, room, rig, corpus, config, seed):
    """
    Draw every random choice of one record.

    Returns:
        tuple: (record seed, target_present, list of source dicts, signals by id)
    """
    record_seed = derive_seed(seed, index)
    rng = make_rng(record_seed)
    target_present = bool(rng.random() >= config.no_target_rate)
    unselected = [s for s in range(1, config.n_sectors + 1) if s not in combo]
    lo, hi = config.interferer_range
    n_interferers = min(int(rng.integers(lo, hi + 1)), len(unselected))
    interferer_sectors = [int(s) for s in rng.choice(unselected, size=n_interferers, replace=False)]
    slots = [('target', s) for s in (combo if target_present else ())]
    slots += [('interferer', s) for s in interferer_sectors]
    if len(corpus) < len(slots):
        raise ResourceError(f'corpus holds {len(corpus)} clips, record {index} needs {len(slots)}')
    picks = rng.choice(len(corpus), size=len(slots), replace=False)

    sources, signals = [], {}
    s_lo, s_hi = config.snr_range_db
    for number, ((role, sector), pick) in enumerate(zip(slots, picks)):
        signal_id = corpus.ids[int(pick)]
        angle, distance, position = _draw_source(rng, room, rig, sector, config)
        snr_db = None if number == 0 else float(rng.uniform(s_lo, s_hi))
        lead = config.head if role == 'target' else 0
        signals[signal_id] = _segment(rng, corpus.load(signal_id), config.length, lead)
        sources.append({
            'signal_id': signal_id,
            'role': role,
            'angle_deg': angle,
            'sector': sector,
            'snr_db': snr_db,
            'distance_m': distance,
            'position': position,
        })
    if target_present:
        sources[0]['snr_db'] = 0.0
    return record_seed, target_present, sources, signals


def _write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    wav_write(AudioBuffer(data), path, encoding='float32')


def generate_record(index, combo, room, rig, corpus, bank, config, seed, out_dir, id_prefix='mix'):
    """Render, scale and write one record; returns its manifest entry."""
    record_seed, target_present, sources, signals = plan_record(index, combo, room, rig, corpus, config, seed)
    scene = SceneSpec(
        room=room,
        rig=rig,
        sources=[SourcePlacement(s['signal_id'], s['position'], s['role']) for s in sources],
        seed=record_seed,
    )
    renders = render_sources(scene, bank, signals, with_array=config.with_array)

    # every SNR is set against the first source's reference-mic render
    anchor = renders[0].ref
    gains = [1.0] + [scale_to_snr(anchor, r.ref, s['snr_db']) for r, s in zip(renders[1:], sources[1:])]
    rendered = combine(renders, gains)
    truth = np.zeros(config.length)
    for source, clean in zip(sources, rendered.per_source_clean_ref):
        if source['role'] == 'target':
            truth = truth + clean

    parts = [rendered.mixture(), truth[np.newaxis, :]]
    if rendered.array_channels is not None:
        parts.append(rendered.array_channels)
    peak = max(float(np.max(np.abs(p))) for p in parts)
    scale = PEAK_LIMIT / peak if peak > PEAK_LIMIT else 1.0

    record_id = f'{id_prefix}-{index:05d}'
    audio = Path('audio') / id_prefix
    _write(out_dir / audio / f'{record_id}_mix.wav', rendered.mixture() * scale)
    _write(out_dir / audio / f'{record_id}_target.wav', truth * scale)
    array_path = None
    if rendered.array_channels is not None:
        array_path = (audio / f'{record_id}_array.wav').as_posix()
        _write(out_dir / array_path, rendered.array_channels * scale)

    record = {
        'id': record_id,
        'mixture_wav_path': (audio / f'{record_id}_mix.wav').as_posix(),
        'array_wav_path': array_path,
        'array_geometry': [list(p) for p in rig.array_geometry()] if array_path else None,
        'target_wav_path': (audio / f'{record_id}_target.wav').as_posix(),
        'n_sectors': config.n_sectors,
        'selected_sectors': mask_from_sectors(combo),
        'per_source': [{k: v for k, v in s.items() if k != 'position'} for s in sources],
        'room_id': room.room_id,
        'rig_id': rig.rig_id,
        'microstructure': bank.spec.name,
        'seed': record_seed,
        'target_present': target_present,
        'noise_head_samples': config.head,
        'length_samples': config.length,
        'prng_algorithm': PRNG_ALGORITHM,
    }
    return validate_record(record)


def generate_mixtures(corpus, rooms, rigs, config, seed, bank, out_dir, name='mixtures', id_prefix='mix',
                      indices=None):
    """
    Generate and write one manifest.

    Args:
        corpus: Corpus of clips
        rooms: RoomSpecs, cycled over records
        rigs: RigTemplates, cycled over records and placed at each room's centre
        config: MixtureConfig
        seed: Manifest seed
        bank: DirectionFilterBank of the microstructure mic
        out_dir: Directory receiving ``<name>.jsonl`` and ``audio/``
        indices: Optional subset of record indices to generate

    Returns:
        list[dict]: records sorted by id

    Raises:
        ResourceError: If the corpus cannot fill a record
    """
    if not rooms or not rigs:
        raise ArgumentError('at least one room and one rig are required')
    out_dir = Path(out_dir)
    jobs = [
        (index, combo)
        for index, (combo, _) in enumerate(itertools.product(
            sector_combinations(config.n_sectors, config.max_targets), range(config.clips_per_combo)))
    ]
    if indices is not None:
        wanted = set(indices)
        jobs = [job for job in jobs if job[0] in wanted]
    records = []
    for index, combo in jobs:
        room = rooms[index % len(rooms)]
        rig = rigs[index % len(rigs)].place(room)
        records.append(generate_record(index, combo, room, rig, corpus, bank, config, seed, out_dir, id_prefix))
        logger.debug(f'Generated {records[-1]["id"]} sectors={combo} room={room.room_id}')
    write_manifest(out_dir / f'{name}.jsonl', records)
    logger.info(f'Wrote {len(records)} records to {out_dir / name}.jsonl')
    return sorted(records, key=lambda r: r['id'])


def split_rooms(rooms, test_rooms):
    """
    Raises:
        ArgumentError: Unknown test room id, or no room left for training
    """
    known = {room.room_id for room in rooms}
    missing = set(test_rooms) - known
    if missing:
        raise ArgumentError(f'unknown test rooms: {sorted(missing)}')
    train = [room for room in rooms if room.room_id not in test_rooms]
    test = [room for room in rooms if room.room_id in test_rooms]
    if not train:
        raise ArgumentError('every room is held out; nothing left to train on')
    return train, test


def generate_splits(corpus, rooms, rigs, config, seed, bank, out_dir, test_rooms=(), valid_fraction=0.1):
    """
    Leave-rooms-out manifests: ``train`` and ``valid`` from the remaining
    rooms, ``test`` from ``test_rooms``.

    Returns:
        dict: split name -> records
    """
    train_rooms, test_room_list = split_rooms(rooms, test_rooms)
    total = len(sector_combinations(config.n_sectors, config.max_targets)) * config.clips_per_combo
    n_valid = int(round(valid_fraction * total))
    order = make_rng(seed, 2).permutation(total)
    valid_indices = sorted(int(i) for i in order[:n_valid])
    train_indices = sorted(int(i) for i in order[n_valid:])

    pool_seed = derive_seed(seed, 0)
    splits = {
        'train': generate_mixtures(corpus, train_rooms, rigs, config, pool_seed, bank, out_dir,
                                   name='train', id_prefix='tr', indices=train_indices),
    }
    if valid_indices:
        splits['valid'] = generate_mixtures(corpus, train_rooms, rigs, config, pool_seed, bank, out_dir,
                                            name='valid', id_prefix='tr', indices=valid_indices)
    if test_room_list:
        splits['test'] = generate_mixtures(corpus, test_room_list, rigs, config, derive_seed(seed, 1), bank,
                                           out_dir, name='test', id_prefix='te')
    return splits
