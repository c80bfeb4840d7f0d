"""
Config serializers shared by commands that frame audio.
"""
from rest_framework import serializers

from apps.common.exceptions import ArgumentError

from .framing import DEFAULT_FRAME, FrameSpec


class FrameSpecSerializer(serializers.Serializer):
    window_len = serializers.IntegerField(default=288, min_value=16, max_value=4096)
    hop = serializers.IntegerField(default=192, min_value=1, max_value=4096)

    def validate(self, attrs):
        try:
            attrs['frame_spec'] = FrameSpec(attrs['window_len'], attrs['hop'])
        except ArgumentError as exc:
            raise serializers.ValidationError({'hop': str(exc)})
        return attrs


def frame_spec_of(attrs):
    """FrameSpec of a validated config holding an optional ``frame`` entry."""
    return attrs.get('frame', {}).get('frame_spec', DEFAULT_FRAME)
