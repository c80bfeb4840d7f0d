"""
Config serializers for the scene commands (``simulate``, ``gen_data``,
``mic_sep``) and the manifest field shared by downstream commands.
"""
from rest_framework import serializers

from apps.common.commands import LabConfigSerializer
from apps.common.exceptions import LabError
from apps.microstructure.serializers import DesignEntrySerializer

from .mixtures import MixtureConfig, read_manifest
from .rooms import ReceiverRig, RigTemplate, RoomSpec
from .sectors import SECTOR_COUNTS
from .separation import DEFAULT_DISTANCES


def _build(factory, **kwargs):
    try:
        return factory(**kwargs)
    except (LabError, TypeError, ValueError) as exc:
        raise serializers.ValidationError(str(exc))


class ManifestField(serializers.CharField):
    """Path of a mixture manifest, validated and loaded on input."""

    def to_internal_value(self, data):
        path = super().to_internal_value(data)
        try:
            return read_manifest(path)
        except (LabError, OSError) as exc:
            raise serializers.ValidationError(f'cannot use manifest {path}: {exc}')

    def to_representation(self, value):
        return str(getattr(value, 'path', value))


def point_field(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3, **kwargs)


def pair_field(child, default):
    return serializers.ListField(child=child, min_length=2, max_length=2, default=default)


class RoomSerializer(serializers.Serializer):
    room_id = serializers.CharField(max_length=32)
    dims = point_field()
    absorption = serializers.FloatField()
    max_order = serializers.IntegerField(default=3)

    def validate(self, attrs):
        attrs['room'] = _build(RoomSpec, dims=attrs['dims'], absorption=attrs['absorption'],
                               max_order=attrs['max_order'], room_id=attrs['room_id'])
        return attrs


class RigTemplateSerializer(serializers.Serializer):
    rig_id = serializers.CharField(max_length=32, default='rig')
    ref_offset = point_field(default=[0.01, 0.0, 0.0])
    orientation_deg = serializers.FloatField(default=0.0)
    array_count = serializers.IntegerField(default=4, min_value=0, max_value=6)
    array_radius = serializers.FloatField(default=0.05, min_value=0.005, max_value=0.1)
    height = serializers.FloatField(default=1.2, min_value=0.1)

    def validate(self, attrs):
        attrs['template'] = _build(RigTemplate, **attrs)
        return attrs


def validate_unique_rooms(value):
    ids = [entry['room_id'] for entry in value]
    if len(set(ids)) != len(ids):
        raise serializers.ValidationError(f'room ids must be unique, got {ids}')
    return value


class GenDataConfigSerializer(LabConfigSerializer):
    corpus = serializers.CharField(required=False)
    synthetic_clips = serializers.IntegerField(required=False, min_value=1)
    rooms = RoomSerializer(many=True, allow_empty=False)
    test_rooms = serializers.ListField(child=serializers.CharField(), default=list)
    valid_fraction = serializers.FloatField(default=0.0, min_value=0.0, max_value=0.5)
    rigs = RigTemplateSerializer(many=True, required=False)
    microstructure = DesignEntrySerializer(required=False)
    angle_step_deg = serializers.FloatField(default=1.0, min_value=0.1, max_value=90.0)
    taps = serializers.IntegerField(default=256, min_value=64, max_value=4096)
    n_sectors = serializers.ChoiceField(choices=SECTOR_COUNTS, default=6)
    max_targets = serializers.IntegerField(default=3, min_value=1, max_value=3)
    snr_range_db = pair_field(serializers.FloatField(min_value=-30.0, max_value=30.0), [-5.0, 5.0])
    clips_per_combo = serializers.IntegerField(default=1, min_value=1)
    clip_seconds = serializers.FloatField(default=3.0, min_value=1.0, max_value=30.0)
    noise_head_seconds = serializers.FloatField(default=0.5, min_value=0.0, max_value=5.0)
    interferer_range = pair_field(serializers.IntegerField(min_value=1, max_value=4), [1, 2])
    distance_range = pair_field(serializers.FloatField(min_value=0.1, max_value=10.0), [0.5, 2.5])
    no_target_rate = serializers.FloatField(default=0.1, min_value=0.0, max_value=1.0)
    with_array = serializers.BooleanField(default=True)

    def validate_rooms(self, value):
        return validate_unique_rooms(value)

    def validate_taps(self, value):
        if value & (value - 1):
            raise serializers.ValidationError('taps must be a power of two.')
        return value

    def validate(self, attrs):
        if ('corpus' in attrs) == ('synthetic_clips' in attrs):
            raise serializers.ValidationError({'corpus': 'Give exactly one of corpus or synthetic_clips.'})
        if attrs['noise_head_seconds'] >= attrs['clip_seconds']:
            raise serializers.ValidationError({'noise_head_seconds': 'The noise head must be shorter than the clip.'})
        room_ids = {entry['room_id'] for entry in attrs['rooms']}
        unknown = sorted(set(attrs['test_rooms']) - room_ids)
        if unknown:
            raise serializers.ValidationError({'test_rooms': f'Unknown room ids {unknown}.'})
        if len(attrs['test_rooms']) == len(room_ids):
            raise serializers.ValidationError({'test_rooms': 'At least one room must remain for training.'})
        try:
            attrs['mixture_config'] = MixtureConfig(
                n_sectors=attrs['n_sectors'],
                max_targets=attrs['max_targets'],
                snr_range_db=attrs['snr_range_db'],
                clips_per_combo=attrs['clips_per_combo'],
                clip_seconds=attrs['clip_seconds'],
                noise_head_seconds=attrs['noise_head_seconds'],
                interferer_range=attrs['interferer_range'],
                distance_range=attrs['distance_range'],
                no_target_rate=attrs['no_target_rate'],
                with_array=attrs['with_array'],
            )
        except LabError as exc:
            raise serializers.ValidationError({'config': str(exc)})
        return attrs


class SceneSourceSerializer(serializers.Serializer):
    """A source given by position, or by device-frame azimuth and distance from the rig."""

    signal_id = serializers.CharField(max_length=64)
    wav_path = serializers.CharField(required=False)
    position = point_field(required=False)
    azimuth_deg = serializers.FloatField(required=False, min_value=0.0)
    distance_m = serializers.FloatField(required=False, min_value=0.05)
    role = serializers.ChoiceField(choices=['target', 'interferer'], default='target')
    gain = serializers.FloatField(default=1.0)

    def validate_azimuth_deg(self, value):
        if value >= 360.0:
            raise serializers.ValidationError('Azimuth must lie in [0, 360).')
        return value

    def validate(self, attrs):
        polar = 'azimuth_deg' in attrs and 'distance_m' in attrs
        if ('position' in attrs) == polar:
            raise serializers.ValidationError(
                {'position': 'Give either position or both azimuth_deg and distance_m.'})
        return attrs


class RigSerializer(serializers.Serializer):
    rig_id = serializers.CharField(max_length=32, default='rig')
    ref_mic_pos = point_field()
    struct_mic_pos = point_field()
    orientation_deg = serializers.FloatField(default=0.0)
    array_positions = serializers.ListField(child=point_field(), default=list, max_length=6)

    def validate(self, attrs):
        attrs['rig'] = _build(ReceiverRig, **attrs)
        return attrs


class SimulateConfigSerializer(LabConfigSerializer):
    room = RoomSerializer()
    rig = RigSerializer()
    sources = SceneSourceSerializer(many=True, allow_empty=False)
    microstructure = DesignEntrySerializer(required=False)
    taps = serializers.IntegerField(default=256, min_value=64, max_value=4096)
    angle_step_deg = serializers.FloatField(default=1.0, min_value=0.1, max_value=90.0)
    signal_seconds = serializers.FloatField(default=3.0, min_value=0.1, max_value=60.0)

    def validate_sources(self, value):
        ids = [entry['signal_id'] for entry in value]
        if len(set(ids)) != len(ids):
            raise serializers.ValidationError(f'signal ids must be unique, got {ids}')
        return value


class MicSepConfigSerializer(LabConfigSerializer):
    rooms = RoomSerializer(many=True, min_length=2)
    n_placements = serializers.IntegerField(default=40, min_value=10)
    distances_m = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=0.5),
        default=list(DEFAULT_DISTANCES), min_length=1,
    )
    band_hz = pair_field(serializers.FloatField(min_value=0.0, max_value=12000.0), [1000.0, 8000.0])
    signal_seconds = serializers.FloatField(default=1.0, min_value=0.1, max_value=10.0)

    def validate_rooms(self, value):
        return validate_unique_rooms(value)

    def validate_band_hz(self, value):
        if value[0] >= value[1]:
            raise serializers.ValidationError('Lower band edge must be below the upper edge.')
        return value
