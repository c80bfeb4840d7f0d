"""
SI-SDR evaluation of extraction systems over a manifest.

Systems:

* ``neural_struct``: a checkpoint trained on microstructure mixtures
* ``neural_flat``: a checkpoint trained on flat-bank mixtures, run on the
  flat-bank rendering of the same scenes when one is given
* ``das`` / ``mvdr``: beamformers over the record's array recording
* ``identity``: the reference-microphone mixture itself

Input SI-SDR is that of the reference-microphone mixture channel against
the target. Records without a target in the selected area are skipped:
SI-SDR of a silent reference is undefined.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import attrs

from apps.baselines.beamformers import DIAGONAL_LOADING, beamform_record
from apps.baselines.steering import ArrayGeometry
from apps.common.exceptions import ArgumentError
from apps.dsx.angle import AngleQuery
from apps.dsx.inference import forward_offline
from apps.signal_core.framing import DEFAULT_FRAME

from .metrics import si_sdr
from .reports import ROW_FIELDS, aggregate_rows

logger = logging.getLogger(__name__)

SYSTEMS = ('neural_struct', 'neural_flat', 'das', 'mvdr', 'identity')
NEURAL_SYSTEMS = ('neural_struct', 'neural_flat')


@attrs.frozen
class EvalRow:
    record_id: str
    system: str
    n_sectors: int
    selected_sectors: int
    input_si_sdr_db: float
    output_si_sdr_db: float

    @property
    def n_selected(self):
        return self.selected_sectors.bit_count()

    @property
    def si_sdri_db(self):
        return self.output_si_sdr_db - self.input_si_sdr_db

    def as_dict(self):
        return {field: getattr(self, field) for field in ROW_FIELDS}


@attrs.frozen(eq=False)
class EvalReport:
    """Rows sorted by (record id, system) and their aggregates."""

    rows: tuple = attrs.field(converter=tuple)
    skipped: tuple = attrs.field(converter=tuple, default=())

    def row_dicts(self):
        return [row.as_dict() for row in self.rows]

    @property
    def aggregates(self):
        return aggregate_rows(self.row_dicts())

    def positive_fraction(self, system=None):
        values = [row.si_sdri_db for row in self.rows if system in (None, row.system)]
        return sum(v > 0.0 for v in values) / len(values) if values else None


def check_systems(systems, checkpoints):
    """
    Raises:
        ArgumentError: No or unknown systems, or a neural system without checkpoint
    """
    systems = tuple(systems)
    if not systems:
        raise ArgumentError('at least one system is required')
    unknown = sorted(set(systems) - set(SYSTEMS))
    if unknown:
        raise ArgumentError(f'unknown systems {unknown}; choose from {SYSTEMS}')
    missing = [s for s in systems if s in NEURAL_SYSTEMS and s not in checkpoints]
    if missing:
        raise ArgumentError(f'systems {missing} need a checkpoint')
    return tuple(dict.fromkeys(systems))


@attrs.frozen(eq=False)
class Evaluator:
    manifest: object
    systems: tuple
    checkpoints: dict = attrs.Factory(dict)
    flat_manifest: object = None
    n_channels: int = None
    loading: float = DIAGONAL_LOADING
    frame_spec: object = DEFAULT_FRAME
    _flat_index: dict = attrs.field(init=False, repr=False)

    def __attrs_post_init__(self):
        records = self.flat_manifest.records if self.flat_manifest is not None else ()
        object.__setattr__(self, '_flat_index', {record['id']: record for record in records})

    def flat_record(self, record):
        if self.flat_manifest is None:
            return self.manifest, record
        flat = self._flat_index.get(record['id'])
        if flat is None:
            raise ArgumentError(f"flat manifest has no record {record['id']}")
        return self.flat_manifest, flat

    def system_output(self, system, record, mixture):
        """(length,) output of ``system`` on one record."""
        if system == 'identity':
            return mixture[0]
        query = AngleQuery(n_sectors=record['n_sectors'], selected=record['selected_sectors'])
        if system == 'neural_struct':
            return forward_offline(mixture, query, self.checkpoints[system])
        if system == 'neural_flat':
            manifest, flat = self.flat_record(record)
            return forward_offline(manifest.load_mixture(flat).data, query, self.checkpoints[system])
        geometry = ArrayGeometry.from_record(record, self.n_channels)
        audio = self.manifest.load_array(record).data[:geometry.count]
        return beamform_record(system, audio, geometry, record['selected_sectors'], record['n_sectors'],
                               record['noise_head_samples'], self.frame_spec, self.loading)

    def record_rows(self, record):
        if not record['target_present']:
            logger.debug(f"Skipping {record['id']}: no target in the selected area")
            return None
        mixture = self.manifest.load_mixture(record).data
        target = self.manifest.load_target(record).data[0]
        input_db = si_sdr(mixture[0], target)
        rows = []
        for system in self.systems:
            output = self.system_output(system, record, mixture)
            rows.append(EvalRow(
                record_id=record['id'],
                system=system,
                n_sectors=record['n_sectors'],
                selected_sectors=record['selected_sectors'],
                input_si_sdr_db=input_db,
                output_si_sdr_db=si_sdr(output, target),
            ))
        return rows


def evaluate(manifest, systems, checkpoints=None, flat_manifest=None, n_channels=None,
             loading=DIAGONAL_LOADING, frame_spec=DEFAULT_FRAME, workers=1):
    """
    Evaluate ``systems`` on every record of ``manifest`` that holds a target.

    Args:
        manifest: Manifest with microstructure mixtures (and array recordings for beamformers)
        systems: Names from SYSTEMS
        checkpoints: System name -> Checkpoint, for the neural systems
        flat_manifest: Flat-bank rendering of the same records for ``neural_flat``
        n_channels: Array microphones used by the beamformers; all when None
        workers: Records evaluated concurrently

    Returns:
        EvalReport: rows sorted by (record id, system), whatever the record order

    Raises:
        ArgumentError: Bad systems or missing checkpoint
    """
    checkpoints = dict(checkpoints or {})
    systems = check_systems(systems, checkpoints)
    if 'neural_flat' in systems and flat_manifest is None:
        logger.warning('neural_flat runs on the microstructure mixtures: no flat manifest given')
    # build networks before the workers share them
    for checkpoint in checkpoints.values():
        checkpoint.model
    evaluator = Evaluator(manifest=manifest, systems=systems, checkpoints=checkpoints,
                          flat_manifest=flat_manifest, n_channels=n_channels, loading=loading,
                          frame_spec=frame_spec)
    records = list(manifest)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(evaluator.record_rows, records))
    rows = [row for result in results if result for row in result]
    skipped = sorted(record['id'] for record, result in zip(records, results) if result is None)
    logger.info(f'Evaluated {len(records) - len(skipped)} records x {len(systems)} systems '
                f'({len(skipped)} without target skipped)')
    return EvalReport(rows=sorted_rows_of(rows), skipped=skipped)


def sorted_rows_of(rows):
    return sorted(rows, key=lambda row: (row.record_id, row.system))


def stack_rows(reports):
    return EvalReport(
        rows=sorted_rows_of(row for report in reports for row in report.rows),
        skipped=sorted(s for report in reports for s in report.skipped),
    )
