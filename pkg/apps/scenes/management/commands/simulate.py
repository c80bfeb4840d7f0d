"""
Render one scene.

Writes ``mixture.wav`` (reference, microstructure), ``array.wav`` when the
rig has an array, one ``clean_<signal_id>.wav`` per source at the reference
mic and ``scene.json`` describing every source's device-frame angle.

Usage:
    python manage.py simulate configs/simulate.json --out runs/scene
"""
from django.conf import settings

from apps.common.commands import ExperimentCommand
from apps.common.exceptions import ArgumentError
from apps.common.files import write_json
from apps.common.random import make_rng
from apps.microstructure.response import fold_angle
from apps.microstructure.serializers import bank_from_config
from apps.scenes.corpus import synthetic_utterance
from apps.scenes.rendering import render_scene
from apps.scenes.rooms import SceneSpec, SourcePlacement
from apps.scenes.serializers import SimulateConfigSerializer
from apps.signal_core.audio import AudioBuffer, wav_read, wav_write
from apps.signal_core.filters import peak_normalize


class Command(ExperimentCommand):
    help = 'Render a single scene to the reference, microstructure and array mics'
    config_serializer = SimulateConfigSerializer

    def load_signal(self, entry, index, config):
        if 'wav_path' in entry:
            buffer = wav_read(entry['wav_path'])
            if buffer.channels != 1:
                raise ArgumentError(f"{entry['wav_path']}: source signals must be mono")
            return peak_normalize(buffer.channel(0))
        return synthetic_utterance(make_rng(config['seed'], index), config['signal_seconds'])

    def run(self, config, out_dir, run):
        rig = config['rig']['rig']
        room = config['room']['room']
        bank = bank_from_config(config)
        signals, sources = {}, []
        for index, entry in enumerate(config['sources']):
            signals[entry['signal_id']] = self.load_signal(entry, index, config)
            position = entry.get('position') or rig.world_point(entry['azimuth_deg'], entry['distance_m'])
            sources.append(SourcePlacement(entry['signal_id'], position, entry['role'], entry['gain']))
        scene = SceneSpec(room=room, rig=rig, sources=sources, seed=config['seed'])
        rendered = render_scene(scene, bank, signals)

        out_dir.mkdir(parents=True, exist_ok=True)
        wav_write(AudioBuffer(rendered.mixture()), out_dir / 'mixture.wav')
        if rendered.array_channels is not None:
            wav_write(AudioBuffer(rendered.array_channels), out_dir / 'array.wav')
        for source, clean in zip(sources, rendered.per_source_clean_ref):
            wav_write(AudioBuffer(clean), out_dir / f'clean_{source.signal_id}.wav')

        described = []
        for source in sources:
            azimuth = rig.device_azimuth(source.position)
            described.append({
                'signal_id': source.signal_id,
                'role': source.role,
                'position': list(source.position),
                'device_azimuth_deg': azimuth,
                'folded_deg': fold_angle(azimuth),
                'gain': source.gain,
            })
        document = {
            'room_id': room.room_id,
            'rig_id': rig.rig_id,
            'microstructure': bank.spec.name,
            'sample_rate': settings.SIEVE_LAB['SAMPLE_RATE'],
            'length_samples': int(len(rendered.ref_channel)),
            'sources': described,
        }
        write_json(out_dir / 'scene.json', document)
        self.stdout.write(f'  • rendered {len(sources)} sources in {room.room_id}')
        return {'sources': len(sources), 'length_samples': document['length_samples']}
