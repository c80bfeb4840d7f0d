"""
Evaluate extraction systems and store one row per (record, system).

Each dataset is evaluated separately and the rows are stacked, so a 6- and
a 9-sector test set can be compared in one run. With more than one dataset
the record ids are prefixed with the dataset name.

Writes ``eval_rows.csv``, ``scatter.csv`` and ``eval_report.json``, and
saves the rows as ``EvaluationRow`` objects of the run.

Usage:
    python manage.py eval configs/eval.json --out runs/eval
"""
import attrs

from apps.common.commands import ExperimentCommand
from apps.evaluation.evaluate import EvalReport, evaluate, sorted_rows_of
from apps.evaluation.reports import write_report, write_rows_csv, write_scatter_csv
from apps.evaluation.serializers import EvalConfigSerializer
from apps.experiments.models import EvaluationRow
from apps.experiments.signals import refresh_run_summary


def save_rows(run, rows):
    objects = [
        EvaluationRow(run=run, **{**row, 'si_sdri_db': row['output_si_sdr_db'] - row['input_si_sdr_db']})
        for row in rows
    ]
    EvaluationRow.objects.bulk_create(objects)
    refresh_run_summary(run)
    return len(objects)


class Command(ExperimentCommand):
    help = 'Evaluate neural and beamforming systems by SI-SDR improvement'
    config_serializer = EvalConfigSerializer

    def run(self, config, out_dir, run):
        datasets = config['datasets']
        rows, skipped = [], []
        for dataset in datasets:
            self.stdout.write(f"  • {dataset['name']}: {len(dataset['manifest'])} records, "
                              f"{dataset['n_sectors']} sectors")
            report = evaluate(
                dataset['manifest'], config['systems'], dataset['checkpoints'],
                flat_manifest=dataset.get('flat_manifest'), n_channels=config.get('n_channels'),
                loading=config['loading'], frame_spec=config['frame_spec'], workers=config['workers'],
            )
            prefix = f"{dataset['name']}/" if len(datasets) > 1 else ''
            rows.extend(attrs.evolve(row, record_id=prefix + row.record_id) for row in report.rows)
            skipped.extend(prefix + record_id for record_id in report.skipped)
        report = EvalReport(rows=sorted_rows_of(rows), skipped=sorted(skipped))

        row_dicts = report.row_dicts()
        write_rows_csv(out_dir / 'eval_rows.csv', row_dicts)
        write_scatter_csv(out_dir / 'scatter.csv', row_dicts)
        write_report(
            out_dir / 'eval_report.json', row_dicts,
            systems=list(config['systems']),
            datasets={d['name']: {'manifest': str(d['manifest'].path), 'n_sectors': d['n_sectors']}
                      for d in datasets},
            skipped=list(report.skipped),
        )
        saved = save_rows(run, row_dicts)
        self.stdout.write(f'  • {saved} rows, {len(report.skipped)} records without target skipped')
        return {
            'rows': saved,
            'skipped': len(report.skipped),
            'systems': list(config['systems']),
            'positive_fraction_by_system': {s: report.positive_fraction(s) for s in config['systems']},
        }
