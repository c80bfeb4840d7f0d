"""
URL configuration for the sieve_lab project.

API Structure:
    /admin/                          - Django admin interface
    /api/v1/runs/                    - Experiment runs (read-only)
    /api/v1/evaluation-rows/         - SI-SDR evaluation rows (read-only)
    /api/v1/auth/login/              - JWT token obtain
    /api/v1/auth/refresh/            - JWT token refresh
    /api/schema/                     - OpenAPI schema
    /api/docs/                       - Swagger UI
    /                                - Redirects to API documentation

Runs and rows are written by the management commands; the API only reads.
"""
from django.contrib import admin
from django.urls import include, path
from django.views.generic import RedirectView
from drf_spectacular.views import SpectacularAPIView, SpectacularSwaggerView
from rest_framework_simplejwt.views import TokenObtainPairView, TokenRefreshView

urlpatterns = [
    path('admin/', admin.site.urls),

    path('api/schema/', SpectacularAPIView.as_view(), name='schema'),
    path('api/docs/', SpectacularSwaggerView.as_view(url_name='schema'), name='swagger-ui'),

    path('api/v1/auth/login/', TokenObtainPairView.as_view(), name='token_obtain_pair'),
    path('api/v1/auth/refresh/', TokenRefreshView.as_view(), name='token_refresh'),

    path('api/v1/', include('apps.experiments.urls', namespace='experiments')),

    path('', RedirectView.as_view(url='/api/docs/', permanent=False), name='api-root'),
]
