"""
Aggregation and export of evaluation rows.

Rows are plain dicts with the ROW_FIELDS keys, whether they come from an
evaluation in memory or from ``EvaluationRow.objects.values()``. Sums use
``math.fsum``, which is exactly rounded, so every aggregate is independent
of row order.
"""
import math
from collections import defaultdict

from apps.common.files import write_csv, write_json
from apps.scenes.sectors import sectors_from_mask

ROW_FIELDS = (
    'record_id',
    'system',
    'n_sectors',
    'selected_sectors',
    'n_selected',
    'input_si_sdr_db',
    'output_si_sdr_db',
    'si_sdri_db',
)
SCATTER_FIELDS = ('system', 'record_id', 'input_si_sdr_db', 'output_si_sdr_db')


def summarize(values):
    """
    Count, mean, population std and fraction of positive values.

    Returns:
        dict: with ``mean`` and ``std`` None for an empty sequence
    """
    values = sorted(float(v) for v in values)
    n = len(values)
    if not n:
        return {'count': 0, 'mean': None, 'std': None, 'positive_fraction': None}
    mean = math.fsum(values) / n
    return {
        'count': n,
        'mean': mean,
        'std': math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n),
        'positive_fraction': sum(v > 0.0 for v in values) / n,
    }


def _grouped(rows, key):
    groups = defaultdict(lambda: defaultdict(list))
    for row in rows:
        for group in key(row):
            groups[row['system']][str(group)].append(row['si_sdri_db'])
    return {
        system: {group: summarize(values) for group, values in sorted(by_group.items())}
        for system, by_group in sorted(groups.items())
    }


def aggregate_rows(rows):
    """
    SI-SDRi summaries of evaluation rows.

    * ``per_system``: all rows of a system
    * ``per_sector``: single-sector queries, keyed by sector count then index (``"6/1"``)
    * ``per_sector_count``: keyed by the number of selected sectors
    * ``per_resolution``: keyed by the sector count of the dataset (6 or 9)

    Every summary carries count, mean, std and the positive-enhancement fraction.
    """
    rows = list(rows)
    per_system = defaultdict(list)
    for row in rows:
        per_system[row['system']].append(row['si_sdri_db'])

    def single_sector(row):
        if row['n_selected'] != 1:
            return []
        (sector,) = sectors_from_mask(row['selected_sectors'], row['n_sectors'])
        return [f"{row['n_sectors']}/{sector}"]

    return {
        'rows': len(rows),
        'per_system': {system: summarize(values) for system, values in sorted(per_system.items())},
        'per_sector': _grouped(rows, single_sector),
        'per_sector_count': _grouped(rows, lambda row: [row['n_selected']]),
        'per_resolution': _grouped(rows, lambda row: [row['n_sectors']]),
    }


def resolution_comparison(rows):
    """
    Single-sector SI-SDRi of every system at each dataset sector count, the
    6- against 9-sector resolution study.

    Returns:
        dict: system -> {sector count: summary}
    """
    return _grouped(rows, lambda row: [row['n_sectors']] if row['n_selected'] == 1 else [])


def sorted_rows(rows):
    return sorted(rows, key=lambda row: (row['record_id'], row['system']))


def write_rows_csv(path, rows):
    return write_csv(path, list(ROW_FIELDS), ([row[f] for f in ROW_FIELDS] for row in sorted_rows(rows)))


def write_scatter_csv(path, rows):
    """Input against output SI-SDR per row; points above the diagonal improved."""
    ordered = sorted(rows, key=lambda row: (row['system'], row['record_id']))
    return write_csv(path, list(SCATTER_FIELDS), ([row[f] for f in SCATTER_FIELDS] for row in ordered))


def write_report(path, rows, **extra):
    rows = list(rows)
    document = {
        **extra,
        'aggregates': aggregate_rows(rows),
        'resolution_comparison': resolution_comparison(rows),
    }
    return write_json(path, document)
