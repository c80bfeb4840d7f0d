from django.apps import AppConfig


class DsxConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.dsx'
    verbose_name = 'Directional Speech Extraction'
