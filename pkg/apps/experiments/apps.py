from django.apps import AppConfig


class ExperimentsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.experiments'
    verbose_name = 'Experiment Runs'

    def ready(self):
        """Import signals when app is ready."""
        import apps.experiments.signals  # noqa
