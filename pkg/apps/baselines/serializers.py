"""
Config serializer for the ``baseline`` command.
"""
from rest_framework import serializers

from apps.common.commands import LabConfigSerializer
from apps.scenes.serializers import ManifestField
from apps.signal_core.serializers import FrameSpecSerializer, frame_spec_of

from .beamformers import DIAGONAL_LOADING, METHODS
from .steering import MAX_MICS


class BaselineConfigSerializer(LabConfigSerializer):
    manifest = ManifestField()
    methods = serializers.ListField(child=serializers.ChoiceField(choices=METHODS), default=list(METHODS),
                                    min_length=1)
    n_channels = serializers.IntegerField(required=False, min_value=2, max_value=MAX_MICS)
    loading = serializers.FloatField(default=DIAGONAL_LOADING, min_value=0.0, max_value=1.0)
    beampattern_freqs_hz = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=12000.0),
        default=[500.0, 1000.0, 2000.0, 4000.0],
    )
    frame = FrameSpecSerializer(required=False)

    def validate_methods(self, value):
        return sorted(set(value), key=value.index)

    def validate(self, attrs):
        attrs['frame_spec'] = frame_spec_of(attrs)
        missing = [r['id'] for r in attrs['manifest'] if not r.get('array_wav_path')]
        if missing:
            raise serializers.ValidationError({'manifest': f'records without array recordings: {missing[:5]}'})
        return attrs
