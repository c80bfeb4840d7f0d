"""
Fit per-frequency normalization statistics of the spatial features.

Writes ``norm_stats.json`` (loadable by ``train``) and ``norm_stats.csv``
with one (bin, feature, mean, var) row per bin and feature.

Usage:
    python manage.py fit_stats configs/fit_stats.json --out runs/stats
"""
from apps.common.commands import ExperimentCommand
from apps.common.files import write_json
from apps.features.normalization import fit_norm_stats
from apps.features.serializers import FitStatsConfigSerializer


class Command(ExperimentCommand):
    help = 'Fit feature normalization statistics on a training manifest'
    config_serializer = FitStatsConfigSerializer

    def run(self, config, out_dir, run):
        frame_spec = config['frame_spec']
        stats = fit_norm_stats(config['manifest'], frame_spec, config['max_records'])
        document = {
            'window_len': frame_spec.window_len,
            'hop': frame_spec.hop,
            **stats.as_dict(),
        }
        write_json(out_dir / 'norm_stats.json', document)
        stats.write_csv(out_dir / 'norm_stats.csv')
        self.stdout.write(f'  • {stats.count} frames over {stats.bins} bins')
        return {'frames': stats.count, 'bins': stats.bins}
