from django.contrib import admin
from django.db.models import Count
from django.utils.html import format_html

from .models import EvaluationRow, ExperimentRun


class EvaluationRowInline(admin.TabularInline):
    model = EvaluationRow
    extra = 0
    fields = ('record_id', 'system', 'n_sectors', 'selected_sectors',
              'input_si_sdr_db', 'output_si_sdr_db', 'si_sdri_db')
    readonly_fields = fields
    can_delete = False
    show_change_link = True


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = (
        'id',
        'command',
        'status_badge',
        'seed',
        'short_hash',
        'rows_count',
        'created_at',
    )
    list_filter = ('command', 'status', 'created_at')
    search_fields = ('command', 'config_sha256', 'output_dir')
    list_per_page = 25
    date_hierarchy = 'created_at'
    ordering = ('-created_at',)
    readonly_fields = ('config_sha256', 'prng_algorithm', 'artifact_version',
                       'created_at', 'updated_at')

    fieldsets = (
        ('Run', {
            'fields': ('command', 'status', 'seed', 'output_dir', 'error_message'),
        }),
        ('Reproduction', {
            'fields': ('config', 'config_sha256', 'prng_algorithm', 'artifact_version'),
        }),
        ('Results', {
            'fields': ('summary',),
        }),
        ('Metadata', {
            'fields': ('created_at', 'updated_at'),
            'classes': ('collapse',),
        }),
    )

    inlines = [EvaluationRowInline]

    def get_queryset(self, request):
        qs = super().get_queryset(request)
        return qs.annotate(num_rows=Count('rows'))

    @admin.display(description='Status', ordering='status')
    def status_badge(self, obj):
        color = {'Completed': '#28a745', 'Failed': '#dc3545'}.get(obj.status, '#ffc107')
        return format_html(
            '<span style="background-color: {}; color: white; padding: 3px 10px; '
            'border-radius: 3px; font-weight: bold;">{}</span>',
            color,
            obj.status
        )

    @admin.display(description='Config')
    def short_hash(self, obj):
        return obj.config_sha256[:12]

    @admin.display(description='Rows', ordering='num_rows')
    def rows_count(self, obj):
        return obj.num_rows if hasattr(obj, 'num_rows') else obj.rows.count()


@admin.register(EvaluationRow)
class EvaluationRowAdmin(admin.ModelAdmin):
    list_display = ('run', 'record_id', 'system', 'n_sectors', 'n_selected', 'si_sdri_display')
    list_filter = ('system', 'n_sectors', 'n_selected')
    search_fields = ('record_id',)
    list_per_page = 50
    readonly_fields = ('si_sdri_db', 'created_at')

    def get_queryset(self, request):
        return super().get_queryset(request).select_related('run')

    @admin.display(description='SI-SDRi (dB)', ordering='si_sdri_db')
    def si_sdri_display(self, obj):
        return format_html('<strong>{}</strong>', f'{obj.si_sdri_db:+.2f}')
