"""
Config serializer for the ``fit_stats`` command.
"""
from rest_framework import serializers

from apps.common.commands import LabConfigSerializer
from apps.scenes.serializers import ManifestField
from apps.signal_core.serializers import FrameSpecSerializer, frame_spec_of


class FitStatsConfigSerializer(LabConfigSerializer):
    manifest = ManifestField()
    max_records = serializers.IntegerField(required=False, allow_null=True, min_value=1, default=None)
    frame = FrameSpecSerializer(required=False)

    def validate(self, attrs):
        attrs['frame_spec'] = frame_spec_of(attrs)
        return attrs
