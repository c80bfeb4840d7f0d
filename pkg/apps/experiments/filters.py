import django_filters

from .models import EvaluationRow, ExperimentRun


class ExperimentRunFilter(django_filters.FilterSet):
    created_after = django_filters.DateFilter(field_name='created_at', lookup_expr='date__gte')
    created_before = django_filters.DateFilter(field_name='created_at', lookup_expr='date__lte')

    class Meta:
        model = ExperimentRun
        fields = ['command', 'status', 'seed']


class EvaluationRowFilter(django_filters.FilterSet):
    min_si_sdri_db = django_filters.NumberFilter(field_name='si_sdri_db', lookup_expr='gte')

    class Meta:
        model = EvaluationRow
        fields = ['run', 'system', 'n_sectors', 'n_selected', 'record_id']
