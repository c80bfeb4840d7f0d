"""
Config serializer for the ``eval`` command.
"""
from rest_framework import serializers

from apps.baselines.beamformers import DIAGONAL_LOADING, METHODS
from apps.baselines.steering import MAX_MICS
from apps.common.commands import LabConfigSerializer
from apps.dsx.serializers import CheckpointField
from apps.scenes.serializers import ManifestField
from apps.signal_core.serializers import FrameSpecSerializer, frame_spec_of

from .evaluate import NEURAL_SYSTEMS, SYSTEMS


class DatasetSerializer(serializers.Serializer):
    """One test set: the microstructure manifest and, optionally, its flat-bank twin."""

    name = serializers.SlugField(max_length=32, required=False)
    manifest = ManifestField()
    flat_manifest = ManifestField(required=False)

    def validate(self, attrs):
        records = attrs['manifest'].records
        if not records:
            raise serializers.ValidationError({'manifest': 'The manifest holds no records.'})
        counts = {record['n_sectors'] for record in records}
        if len(counts) != 1:
            raise serializers.ValidationError({'manifest': f'Records mix sector counts {sorted(counts)}.'})
        attrs['n_sectors'] = counts.pop()
        if 'flat_manifest' in attrs:
            flat_ids = {record['id'] for record in attrs['flat_manifest']}
            missing = sorted(r['id'] for r in records if r['target_present'] and r['id'] not in flat_ids)
            if missing:
                raise serializers.ValidationError({'flat_manifest': f'Missing records {missing[:5]}.'})
        return attrs


class EvalConfigSerializer(LabConfigSerializer):
    datasets = DatasetSerializer(many=True, allow_empty=False)
    systems = serializers.ListField(child=serializers.ChoiceField(choices=SYSTEMS), min_length=1)
    checkpoints = serializers.DictField(
        child=serializers.ListField(child=CheckpointField(), min_length=1), default=dict,
    )
    n_channels = serializers.IntegerField(required=False, min_value=2, max_value=MAX_MICS)
    loading = serializers.FloatField(default=DIAGONAL_LOADING, min_value=0.0, max_value=1.0)
    workers = serializers.IntegerField(default=1, min_value=1, max_value=64)
    frame = FrameSpecSerializer(required=False)

    def validate_systems(self, value):
        return sorted(set(value), key=value.index)

    def validate_checkpoints(self, value):
        unknown = sorted(set(value) - set(NEURAL_SYSTEMS))
        if unknown:
            raise serializers.ValidationError(f'Checkpoints are only used by {NEURAL_SYSTEMS}, got {unknown}.')
        return value

    def validate(self, attrs):
        attrs['frame_spec'] = frame_spec_of(attrs)
        datasets = attrs['datasets']
        for index, dataset in enumerate(datasets):
            dataset.setdefault('name', f"set{index + 1}")
        names = [dataset['name'] for dataset in datasets]
        if len(set(names)) != len(names):
            raise serializers.ValidationError({'datasets': f'Dataset names must be unique, got {names}.'})

        for dataset in datasets:
            dataset['checkpoints'] = {}
            for system in attrs['systems']:
                if system not in NEURAL_SYSTEMS:
                    continue
                candidates = [c for c in attrs['checkpoints'].get(system, [])
                              if c.config.n_sectors == dataset['n_sectors']]
                if not candidates:
                    raise serializers.ValidationError({
                        'checkpoints': f"{system} needs a {dataset['n_sectors']}-sector checkpoint "
                                       f"for dataset {dataset['name']}.",
                    })
                dataset['checkpoints'][system] = candidates[0]

            if any(system in METHODS for system in attrs['systems']):
                missing = [r['id'] for r in dataset['manifest'] if not r.get('array_wav_path')]
                if missing:
                    raise serializers.ValidationError(
                        {'datasets': f"{dataset['name']}: records without array recordings {missing[:5]}."})
        return attrs
