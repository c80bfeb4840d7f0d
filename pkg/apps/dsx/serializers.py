"""
Config serializers for the ``train``, ``infer`` and ``stream`` commands.
"""
from rest_framework import serializers

from apps.common.exceptions import LabError
from apps.common.commands import LabConfigSerializer
from apps.common.files import read_json
from apps.features.normalization import NormStats
from apps.scenes.sectors import SECTOR_COUNTS
from apps.scenes.serializers import ManifestField

from .checkpoint import load_checkpoint
from .config import NetConfig
from .training import TrainConfig


def _build(factory, **kwargs):
    try:
        return factory(**kwargs)
    except (LabError, TypeError, ValueError) as exc:
        raise serializers.ValidationError(str(exc))


class NormStatsField(serializers.CharField):
    """Path of a ``norm_stats.json`` written by ``fit_stats``."""

    def to_internal_value(self, data):
        path = super().to_internal_value(data)
        try:
            document = read_json(path)
            return {
                'stats': NormStats.from_dict(document),
                'window_len': document.get('window_len'),
                'hop': document.get('hop'),
            }
        except (LabError, OSError, ValueError, KeyError) as exc:
            raise serializers.ValidationError(f'cannot use normalization statistics {path}: {exc}')


class CheckpointField(serializers.CharField):

    def to_internal_value(self, data):
        path = super().to_internal_value(data)
        try:
            return load_checkpoint(path)
        except (LabError, OSError) as exc:
            raise serializers.ValidationError(f'cannot use checkpoint {path}: {exc}')


class NetConfigSerializer(serializers.Serializer):
    chunk_samples = serializers.IntegerField(default=192, min_value=8, max_value=4096)
    window_len = serializers.IntegerField(default=288, min_value=16, max_value=4096)
    embed_channels = serializers.IntegerField(default=16, min_value=1, max_value=256)
    n_blocks = serializers.IntegerField(default=2, min_value=1, max_value=16)
    freq_downsample = serializers.IntegerField(default=4, min_value=1, max_value=64)
    blstm_hidden = serializers.IntegerField(default=32, min_value=1, max_value=512)
    causal_lstm_hidden = serializers.IntegerField(default=32, min_value=1, max_value=512)
    angle_hidden = serializers.IntegerField(default=32, min_value=1, max_value=512)


class TrainConfigSerializer(serializers.Serializer):
    epochs = serializers.IntegerField(default=40, min_value=1, max_value=1000)
    batch_size = serializers.IntegerField(default=4, min_value=1, max_value=256)
    lr_start = serializers.FloatField(default=5e-4, min_value=0.0)
    lr_peak = serializers.FloatField(default=5e-3, min_value=0.0)
    warmup_epochs = serializers.IntegerField(default=10, min_value=0)
    hold_epochs = serializers.IntegerField(default=20, min_value=0)
    decay = serializers.FloatField(default=0.95, min_value=0.0, max_value=1.0)
    decay_every = serializers.IntegerField(default=2, min_value=1)
    augment_probability = serializers.FloatField(default=0.3, min_value=0.0, max_value=1.0)
    max_shift_seconds = serializers.FloatField(default=0.25, min_value=0.0, max_value=5.0)
    max_gain_db = serializers.FloatField(default=3.0, min_value=0.0, max_value=24.0)
    silent_weight = serializers.FloatField(default=50.0, min_value=0.0)
    max_steps = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)


class TrainCommandSerializer(LabConfigSerializer):
    manifest = ManifestField()
    valid_manifest = ManifestField(required=False)
    norm_stats = NormStatsField()
    n_sectors = serializers.ChoiceField(choices=SECTOR_COUNTS, default=6)
    net = NetConfigSerializer(required=False)
    training = TrainConfigSerializer(required=False)

    def validate(self, attrs):
        net = dict(attrs.get('net') or NetConfigSerializer().to_internal_value({}))
        net['lookahead_samples'] = net['window_len'] - net['chunk_samples']
        attrs['net_config'] = _build(NetConfig, n_sectors=attrs['n_sectors'], **net)
        training = attrs.get('training') or TrainConfigSerializer().to_internal_value({})
        attrs['train_config'] = _build(TrainConfig, **dict(training))
        stats = attrs['norm_stats']
        frame = attrs['net_config'].frame
        if stats['window_len'] is not None and (stats['window_len'], stats['hop']) != (frame.window_len, frame.hop):
            raise serializers.ValidationError({
                'norm_stats': f"statistics were fitted on {stats['window_len']}/{stats['hop']} frames, "
                              f'the network uses {frame.window_len}/{frame.hop}'
            })
        return attrs


def validate_sectors(value):
    if len(set(value)) != len(value):
        raise serializers.ValidationError(f'sectors must be distinct, got {value}')
    return sorted(value)


class InferConfigSerializer(LabConfigSerializer):
    """
    Offline extraction of either one WAV (``input`` + ``sectors``) or every
    record of a manifest, each with its own sector selection.
    """

    checkpoint = CheckpointField()
    n_sectors = serializers.ChoiceField(choices=SECTOR_COUNTS, required=False)
    input = serializers.CharField(required=False)
    sectors = serializers.ListField(child=serializers.IntegerField(min_value=1, max_value=9),
                                    min_length=1, max_length=3, required=False)
    manifest = ManifestField(required=False)

    def validate_sectors(self, value):
        return validate_sectors(value)

    def validate(self, attrs):
        if ('input' in attrs) == ('manifest' in attrs):
            raise serializers.ValidationError({'input': 'Give exactly one of input or manifest.'})
        if 'input' in attrs and 'sectors' not in attrs:
            raise serializers.ValidationError({'sectors': 'A single input needs its sector selection.'})
        return attrs


class StreamConfigSerializer(LabConfigSerializer):
    """
    Chunked streaming of one two-channel WAV file, or of raw interleaved f32
    samples (``.f32`` / ``.raw``), plus an optional throughput benchmark.
    """

    checkpoint = CheckpointField()
    n_sectors = serializers.ChoiceField(choices=SECTOR_COUNTS, required=False)
    input = serializers.CharField(required=False)
    sectors = serializers.ListField(child=serializers.IntegerField(min_value=1, max_value=9),
                                    min_length=1, max_length=3)
    benchmark_chunks = serializers.IntegerField(default=0, min_value=0, max_value=100000)

    def validate_sectors(self, value):
        return validate_sectors(value)

    def validate(self, attrs):
        if 'input' not in attrs and not attrs['benchmark_chunks']:
            raise serializers.ValidationError({'input': 'Give an input file, benchmark_chunks, or both.'})
        return attrs
