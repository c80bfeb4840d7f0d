"""
URL configuration for the experiments app.

Generated URL Patterns:
    - GET /api/v1/runs/                    - experiments:run-list
    - GET /api/v1/runs/{id}/               - experiments:run-detail
    - GET /api/v1/runs/{id}/aggregates/    - experiments:run-aggregates
    - GET /api/v1/evaluation-rows/         - experiments:evaluation-row-list
    - GET /api/v1/evaluation-rows/{id}/    - experiments:evaluation-row-detail

All endpoints require JWT authentication.
"""
from rest_framework.routers import DefaultRouter

from .views import EvaluationRowViewSet, ExperimentRunViewSet

app_name = 'experiments'

router = DefaultRouter()
router.register(r'runs', ExperimentRunViewSet, basename='run')
router.register(r'evaluation-rows', EvaluationRowViewSet, basename='evaluation-row')

urlpatterns = router.urls
