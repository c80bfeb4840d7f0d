from django.apps import AppConfig


class SignalCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.signal_core'
    verbose_name = 'Signal Core'
