"""
Mic-separation experiment: signal-ratio variation against mic distance.

Writes ``variation.csv`` (freq_hz, one column per distance) and
``summary.json`` with the band-mean variation per distance.

Usage:
    python manage.py mic_sep configs/mic_sep.json --out runs/mic_sep
"""
from apps.common.commands import ExperimentCommand
from apps.common.files import write_csv, write_json
from apps.scenes.separation import mic_separation_experiment
from apps.scenes.serializers import MicSepConfigSerializer


class Command(ExperimentCommand):
    help = 'Measure two-mic signal-ratio variation across placements'
    config_serializer = MicSepConfigSerializer

    def run(self, config, out_dir, run):
        rooms = [entry['room'] for entry in config['rooms']]
        result = mic_separation_experiment(
            rooms, config['n_placements'], config['seed'],
            distances=config['distances_m'], signal_seconds=config['signal_seconds'],
        )
        write_csv(
            out_dir / 'variation.csv',
            ['freq_hz'] + [f'{d:g}m' for d in result.distances],
            result.csv_rows(),
        )
        f_lo, f_hi = config['band_hz']
        means = result.band_mean(f_lo, f_hi)
        summary = {
            'band_hz': [f_lo, f_hi],
            'mean_variation_db': {f'{d:g}': value for d, value in means.items()},
        }
        write_json(out_dir / 'summary.json', summary)
        for d, value in means.items():
            self.stdout.write(f'  {d * 100:g} cm: {value:.3f} dB')
        return summary
