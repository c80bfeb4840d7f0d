"""
Run the delay-and-sum and MVDR baselines over a manifest.

Every record's array recording is beamformed toward the centres of its
selected sectors. Writes ``<method>/<record id>.wav``, ``baseline_rows.jsonl``
(one row per record and method) and ``beampattern.csv`` with the
delay-and-sum pattern of the first record's array toward every sector
centre.

Usage:
    python manage.py baseline configs/baseline.json --out runs/baseline
"""
import numpy as np

from apps.baselines.beamformers import beamform_record, beampattern, das_weights, sector_steer
from apps.baselines.serializers import BaselineConfigSerializer
from apps.baselines.steering import ArrayGeometry
from apps.common.commands import ExperimentCommand
from apps.common.files import write_csv, write_jsonl
from apps.signal_core.audio import AudioBuffer, wav_write

PATTERN_ANGLES = np.arange(0.0, 360.0, 1.0)


def pattern_rows(geometry, n_sectors, freqs):
    for sector in range(1, n_sectors + 1):
        (look,) = sector_steer([sector], n_sectors)
        for f in freqs:
            gains = beampattern(geometry, das_weights(geometry, look, f), f, PATTERN_ANGLES)
            for angle, gain in zip(PATTERN_ANGLES, gains):
                yield look, f, float(angle), float(20.0 * np.log10(max(gain, 1e-12)))


class Command(ExperimentCommand):
    help = 'Beamform the array recordings of a manifest with delay-and-sum and MVDR'
    config_serializer = BaselineConfigSerializer

    def run(self, config, out_dir, run):
        manifest = config['manifest']
        n_channels = config.get('n_channels')
        rows = []
        for record in manifest:
            geometry = ArrayGeometry.from_record(record, n_channels)
            audio = manifest.load_array(record).data[:geometry.count]
            for method in config['methods']:
                output = beamform_record(
                    method, audio, geometry, record['selected_sectors'], record['n_sectors'],
                    record['noise_head_samples'], config['frame_spec'], config['loading'],
                )
                path = out_dir / method / f"{record['id']}.wav"
                path.parent.mkdir(parents=True, exist_ok=True)
                wav_write(AudioBuffer(output), path)
                rows.append({
                    'record_id': record['id'],
                    'method': method,
                    'n_channels': geometry.count,
                    'look_angles_deg': sector_steer(record['selected_sectors'], record['n_sectors']),
                    'loading': config['loading'] if method == 'mvdr' else None,
                    'output_wav_path': path.relative_to(out_dir).as_posix(),
                })
        write_jsonl(out_dir / 'baseline_rows.jsonl', rows)

        first = manifest.records[0]
        write_csv(out_dir / 'beampattern.csv', ['look_deg', 'freq_hz', 'angle_deg', 'gain_db'],
                  pattern_rows(ArrayGeometry.from_record(first, n_channels), first['n_sectors'],
                               config['beampattern_freqs_hz']))
        self.stdout.write(f"  • {len(manifest)} records x {len(config['methods'])} methods")
        return {'records': len(manifest), 'methods': config['methods'], 'rows': len(rows)}
