"""
Read-only API over experiment runs and evaluation rows.

Endpoints:
- GET /api/v1/runs/                      - List runs (paginated)
- GET /api/v1/runs/{id}/                 - Run details with config and summary
- GET /api/v1/runs/{id}/aggregates/      - Per-system / per-sector / per-count SI-SDRi
- GET /api/v1/evaluation-rows/           - List rows, filterable by run, system, n_sectors
- GET /api/v1/evaluation-rows/{id}/      - Row details
"""
import logging

from django_filters.rest_framework import DjangoFilterBackend
from drf_spectacular.utils import extend_schema
from rest_framework import filters, viewsets
from rest_framework.decorators import action
from rest_framework.permissions import IsAuthenticated
from rest_framework.response import Response
from rest_framework_simplejwt.authentication import JWTAuthentication

from apps.evaluation.reports import ROW_FIELDS, aggregate_rows

from .filters import EvaluationRowFilter, ExperimentRunFilter
from .models import EvaluationRow, ExperimentRun
from .pagination import EvaluationRowPagination, RunPagination
from .serializers import (
    EvaluationRowSerializer,
    ExperimentRunDetailSerializer,
    ExperimentRunListSerializer,
)

logger = logging.getLogger(__name__)


class ExperimentRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Runs recorded by the lab's management commands.

    Query Parameters:
    - command: Filter by command (design, gen_data, train, eval...)
    - status: Running, Completed or Failed
    - created_after / created_before: Date range (YYYY-MM-DD)
    - ordering: e.g. -created_at, seed
    """

    queryset = ExperimentRun.objects.all()
    authentication_classes = [JWTAuthentication]
    permission_classes = [IsAuthenticated]
    pagination_class = RunPagination
    filter_backends = [DjangoFilterBackend, filters.SearchFilter, filters.OrderingFilter]
    filterset_class = ExperimentRunFilter
    search_fields = ['command', 'config_sha256']
    ordering_fields = ['created_at', 'seed', 'command']
    ordering = ['-created_at']

    def get_serializer_class(self):
        if self.action == 'list':
            return ExperimentRunListSerializer
        return ExperimentRunDetailSerializer

    @extend_schema(responses={200: dict})
    @action(detail=True, methods=['get'], url_path='aggregates')
    def aggregates(self, request, pk=None):
        """
        Mean and standard deviation of SI-SDRi per system, per sector index,
        per number of selected sectors and per sector count, plus the
        fraction of positive enhancements.
        """
        run = self.get_object()
        rows = list(run.rows.values(*ROW_FIELDS))
        logger.debug(f"Aggregates of run {run.pk} requested by user {request.user.username}")
        return Response(aggregate_rows(rows))

    def handle_exception(self, exc):
        logger.error(f"Exception in ExperimentRunViewSet: {str(exc)}", exc_info=True)
        return super().handle_exception(exc)


class EvaluationRowViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Individual evaluation rows.

    Query Parameters:
    - run, system, n_sectors, n_selected, record_id: Exact filters
    - min_si_sdri_db: Rows with SI-SDRi at least this value
    - ordering: e.g. -si_sdri_db
    """

    queryset = EvaluationRow.objects.select_related('run')
    serializer_class = EvaluationRowSerializer
    authentication_classes = [JWTAuthentication]
    permission_classes = [IsAuthenticated]
    pagination_class = EvaluationRowPagination
    filter_backends = [DjangoFilterBackend, filters.OrderingFilter]
    filterset_class = EvaluationRowFilter
    ordering_fields = ['si_sdri_db', 'input_si_sdr_db', 'output_si_sdr_db', 'record_id']
    ordering = ['id']

    def handle_exception(self, exc):
        logger.error(f"Exception in EvaluationRowViewSet: {str(exc)}", exc_info=True)
        return super().handle_exception(exc)
