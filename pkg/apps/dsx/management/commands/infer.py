"""
Offline extraction with a trained checkpoint.

With ``input`` the two-channel WAV is processed once for ``sectors`` and
written to ``estimate.wav``; with ``manifest`` every record is processed
with its own sector selection into ``estimates/<record id>.wav``.

Usage:
    python manage.py infer configs/infer.json --out runs/infer
"""
from apps.common.commands import ExperimentCommand
from apps.dsx.angle import AngleQuery
from apps.dsx.inference import forward_offline
from apps.dsx.serializers import InferConfigSerializer
from apps.signal_core.audio import AudioBuffer, wav_read, wav_write


class Command(ExperimentCommand):
    help = 'Extract the speech of the selected sectors from two-channel recordings'
    config_serializer = InferConfigSerializer

    def run(self, config, out_dir, run):
        checkpoint = config['checkpoint']
        n_sectors = config.get('n_sectors', checkpoint.config.n_sectors)
        checkpoint.check_sectors(n_sectors)

        if 'input' in config:
            query = AngleQuery.of(config['sectors'], n_sectors)
            estimate = forward_offline(wav_read(config['input']).data, query, checkpoint)
            wav_write(AudioBuffer(estimate), out_dir / 'estimate.wav')
            self.stdout.write(f"  • {config['input']} -> estimate.wav, sectors {list(query.sectors)}")
            return {'outputs': 1, 'sectors': list(query.sectors)}

        manifest = config['manifest']
        estimates = out_dir / 'estimates'
        estimates.mkdir(parents=True, exist_ok=True)
        for record in manifest:
            query = AngleQuery(n_sectors=n_sectors, selected=record['selected_sectors'])
            estimate = forward_offline(manifest.load_mixture(record).data, query, checkpoint)
            wav_write(AudioBuffer(estimate), estimates / f"{record['id']}.wav")
        self.stdout.write(f'  • {len(manifest)} estimates written')
        return {'outputs': len(manifest)}
