"""
Serializers for the experiments app.

Runs and rows are created by management commands only, so every serializer
here is read-only.
"""
from rest_framework import serializers

from .models import EvaluationRow, ExperimentRun


class EvaluationRowSerializer(serializers.ModelSerializer):

    class Meta:
        model = EvaluationRow
        fields = [
            'id',
            'run',
            'record_id',
            'system',
            'n_sectors',
            'selected_sectors',
            'n_selected',
            'input_si_sdr_db',
            'output_si_sdr_db',
            'si_sdri_db',
            'created_at',
        ]
        read_only_fields = fields


class ExperimentRunListSerializer(serializers.ModelSerializer):
    """
    Lightweight serializer for listing runs (no config document).
    """

    class Meta:
        model = ExperimentRun
        fields = [
            'id',
            'command',
            'status',
            'seed',
            'config_sha256',
            'created_at',
        ]
        read_only_fields = fields


class ExperimentRunDetailSerializer(serializers.ModelSerializer):
    """
    Full run record, including the metadata needed to reproduce it.
    """

    row_count = serializers.SerializerMethodField()

    class Meta:
        model = ExperimentRun
        fields = [
            'id',
            'command',
            'status',
            'config',
            'config_sha256',
            'seed',
            'prng_algorithm',
            'artifact_version',
            'output_dir',
            'summary',
            'error_message',
            'row_count',
            'created_at',
            'updated_at',
        ]
        read_only_fields = fields

    def get_row_count(self, obj):
        return obj.rows.count()


class AggregateSerializer(serializers.Serializer):
    key = serializers.CharField()
    count = serializers.IntegerField()
    mean_si_sdri_db = serializers.FloatField()
    std_si_sdri_db = serializers.FloatField()
