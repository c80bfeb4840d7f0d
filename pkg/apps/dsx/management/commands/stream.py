"""
Chunked streaming extraction with per-chunk timing.

The input is a two-channel WAV or raw interleaved f32 file (``.f32`` /
``.raw``). Outputs ``stream.wav`` and ``stream.f32`` aligned with offline
processing, and ``chunk_timings.csv``. With ``benchmark_chunks`` the step
time is also measured on that many random chunks.

BLAS libraries are limited to one thread for this command (see manage.py).

Usage:
    python manage.py stream configs/stream.json --out runs/stream
"""
from pathlib import Path

import numpy as np

from apps.common.commands import ExperimentCommand
from apps.common.files import write_csv
from apps.dsx.angle import AngleQuery
from apps.dsx.serializers import StreamConfigSerializer
from apps.dsx.streaming import benchmark, read_interleaved, stream_audio, write_raw
from apps.signal_core.audio import AudioBuffer, wav_read, wav_write

RAW_SUFFIXES = ('.f32', '.raw')


def read_input(path):
    path = Path(path)
    if path.suffix.lower() in RAW_SUFFIXES:
        return read_interleaved(path)
    return wav_read(path).data


class Command(ExperimentCommand):
    help = 'Stream a recording through a checkpoint chunk by chunk and report timing'
    config_serializer = StreamConfigSerializer

    def run(self, config, out_dir, run):
        checkpoint = config['checkpoint']
        n_sectors = config.get('n_sectors', checkpoint.config.n_sectors)
        checkpoint.check_sectors(n_sectors)
        query = AngleQuery.of(config['sectors'], n_sectors)
        summary = {'sectors': list(query.sectors), 'latency_samples': checkpoint.config.latency_samples}

        if 'input' in config:
            output, timings = stream_audio(read_input(config['input']), query, checkpoint)
            out_dir.mkdir(parents=True, exist_ok=True)
            wav_write(AudioBuffer(output), out_dir / 'stream.wav')
            write_raw(out_dir / 'stream.f32', output)
            write_csv(out_dir / 'chunk_timings.csv', ['chunk', 'ms'], enumerate(timings.tolist()))
            summary.update({
                'chunks': len(timings),
                'mean_ms': float(np.mean(timings)),
                'std_ms': float(np.std(timings)),
            })
            self.stdout.write(
                f"  • {summary['chunks']} chunks, {summary['mean_ms']:.3f} ± {summary['std_ms']:.3f} ms per chunk"
            )

        if config['benchmark_chunks']:
            result = benchmark(checkpoint, query, config['benchmark_chunks'], config['seed'])
            summary['benchmark'] = result
            self.stdout.write(
                f"  • benchmark: {result['chunks']} chunks, {result['mean_ms']:.3f} ± {result['std_ms']:.3f} ms"
            )
        return summary
