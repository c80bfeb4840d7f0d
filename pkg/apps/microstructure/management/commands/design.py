"""
Compare microstructure designs by spatial diversity.

Writes, under the output directory:
- diversity.csv: V(f) of every design on the FIR's DFT grid
- distance_<name>.csv: pairwise distance matrix per design over the band
- summary.json: designs ranked by band-mean diversity
- bank_<name>.csv: (angle, tap, value) filter dumps when export_banks is set

Usage:
    python manage.py design configs/design.json --out runs/design
"""
import numpy as np
from django.conf import settings

from apps.common.commands import ExperimentCommand
from apps.common.files import write_csv, write_json
from apps.microstructure.diversity import design_sweep, pairwise_distance_map, spatial_diversity
from apps.microstructure.response import uniform_grid
from apps.microstructure.serializers import DesignConfigSerializer


class Command(ExperimentCommand):
    help = 'Sweep microstructure designs and rank them by spatial diversity'
    config_serializer = DesignConfigSerializer

    def run(self, config, out_dir, run):
        specs = [entry['microstructure'] for entry in config['designs']]
        f_lo, f_hi = config['band_hz']
        grid = uniform_grid(config['angle_step_deg'])
        banks = {}
        ranked = design_sweep(specs, (f_lo, f_hi), grid, config['taps'], banks=banks)

        freqs = np.fft.rfftfreq(config['taps'], d=1.0 / settings.SIEVE_LAB['SAMPLE_RATE'])
        curves = [spatial_diversity(banks[spec.name], freqs) for spec in specs]
        write_csv(
            out_dir / 'diversity.csv',
            ['freq_hz'] + [spec.name for spec in specs],
            ([float(f)] + [float(c[i]) for c in curves] for i, f in enumerate(freqs)),
        )

        for spec in specs:
            bank = banks[spec.name]
            distances = pairwise_distance_map(bank, f_lo, f_hi)
            write_csv(
                out_dir / f'distance_{spec.name}.csv',
                ['angle_deg'] + [f'{a:g}' for a in bank.angle_grid],
                ([float(a)] + [float(v) for v in row] for a, row in zip(bank.angle_grid, distances)),
            )
            if config['export_banks']:
                write_csv(out_dir / f'bank_{spec.name}.csv', ['angle_deg', 'tap', 'value'], bank.csv_rows())
            self.stdout.write(f'  • {spec.name}: {len(bank)} angles realized')

        summary = [s.as_dict() for s in ranked]
        write_json(out_dir / 'summary.json', {'band_hz': [f_lo, f_hi], 'ranking': summary})
        for s in ranked:
            self.stdout.write(f'  {s.rank}. {s.name}  V={s.mean_diversity:.4g}  D={s.mean_distance:.4g}')
        return {'ranking': [s.name for s in ranked], 'best': ranked[0].name}
