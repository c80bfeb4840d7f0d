"""
Config serializers for the ``design`` command.
"""
import attrs as attrs_lib
from rest_framework import serializers

from apps.common.commands import LabConfigSerializer
from apps.common.exceptions import LabError

from .response import realize_bank, uniform_grid
from .specs import PRESETS, load_spec, preset, spec_from_document, with_diameter


class DesignEntrySerializer(serializers.Serializer):
    """
    One candidate design: a preset (optionally resized), an inline spec
    document or a path to one.
    """

    preset = serializers.ChoiceField(choices=sorted(PRESETS), required=False)
    diameter = serializers.FloatField(required=False, min_value=0.005, max_value=0.05)
    spec = serializers.JSONField(required=False)
    spec_path = serializers.CharField(required=False)
    name = serializers.CharField(required=False, max_length=64)

    def validate(self, attrs):
        sources = [key for key in ('preset', 'spec', 'spec_path') if key in attrs]
        if len(sources) != 1:
            raise serializers.ValidationError('Give exactly one of preset, spec or spec_path.')
        try:
            if 'preset' in attrs:
                spec = preset(attrs['preset'])
            elif 'spec' in attrs:
                spec = spec_from_document(attrs['spec'])
            else:
                spec = load_spec(attrs['spec_path'])
            if 'diameter' in attrs:
                spec = with_diameter(spec, attrs['diameter'])
        except (LabError, OSError) as exc:
            field = next(key for key in ('spec_path', 'spec', 'preset') if key in attrs)
            raise serializers.ValidationError({field: str(exc)})
        if 'name' in attrs:
            spec = attrs_lib.evolve(spec, name=attrs['name'])
        attrs['microstructure'] = spec
        return attrs


class DesignConfigSerializer(LabConfigSerializer):
    designs = DesignEntrySerializer(many=True, allow_empty=False)
    band_hz = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=12000.0),
        min_length=2, max_length=2, default=[1000.0, 4000.0],
    )
    angle_step_deg = serializers.FloatField(default=1.0, min_value=0.1, max_value=90.0)
    taps = serializers.IntegerField(default=256, min_value=64, max_value=4096)
    export_banks = serializers.BooleanField(default=False)

    def validate_band_hz(self, value):
        if value[0] >= value[1]:
            raise serializers.ValidationError('Lower band edge must be below the upper edge.')
        return value

    def validate_taps(self, value):
        if value & (value - 1):
            raise serializers.ValidationError('taps must be a power of two.')
        return value

    def validate_designs(self, value):
        if len(value) < 2:
            raise serializers.ValidationError('A sweep compares at least two designs.')
        names = [entry['microstructure'].name for entry in value]
        if len(set(names)) != len(names):
            raise serializers.ValidationError(f'Design names must be unique, got {names}; set "name".')
        return value


def bank_from_config(config):
    """
    Filter bank for a validated config with an optional ``microstructure``
    entry (default preset when absent), ``angle_step_deg`` and ``taps``.
    """
    entry = config.get('microstructure')
    spec = entry['microstructure'] if entry else preset('default')
    return realize_bank(spec, uniform_grid(config['angle_step_deg']), config['taps'])
