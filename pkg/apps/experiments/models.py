from django.core.exceptions import ValidationError
from django.db import models

SI_SDRI_TOLERANCE = 1e-9


class ExperimentRun(models.Model):
    """
    One invocation of a lab management command.

    Stores everything needed to reproduce the run (command, config document,
    seed, PRNG and artifact versions) plus a summary that commands and the
    evaluation-row signals keep current.
    """

    STATUS_CHOICES = [
        ('Running', 'Running'),
        ('Completed', 'Completed'),
        ('Failed', 'Failed'),
    ]

    command = models.CharField(
        max_length=32,
        help_text="Management command that produced this run"
    )
    config = models.JSONField(
        default=dict,
        help_text="Validated JSON config document (after flag overrides)"
    )
    config_sha256 = models.CharField(
        max_length=64,
        help_text="SHA-256 of the canonical config JSON"
    )
    seed = models.BigIntegerField(
        default=0,
        help_text="Top-level seed"
    )
    prng_algorithm = models.CharField(
        max_length=32,
        help_text="Name of the pseudo-random generator"
    )
    artifact_version = models.CharField(
        max_length=32,
        help_text="Lab artifact version"
    )
    output_dir = models.CharField(
        max_length=500,
        help_text="Directory holding every output of the run"
    )
    status = models.CharField(
        max_length=20,
        choices=STATUS_CHOICES,
        default='Running',
        help_text="Run status"
    )
    summary = models.JSONField(
        default=dict,
        blank=True,
        help_text="Command-specific summary values"
    )
    error_message = models.TextField(
        blank=True,
        default='',
        help_text="Error text of a failed run"
    )

    created_at = models.DateTimeField(
        auto_now_add=True,
        help_text="Run start timestamp"
    )
    updated_at = models.DateTimeField(
        auto_now=True,
        help_text="Last update timestamp"
    )

    class Meta:
        ordering = ['-created_at', '-id']
        verbose_name = 'Experiment Run'
        verbose_name_plural = 'Experiment Runs'
        indexes = [
            models.Index(fields=['command'], name='experiments_command_3f1c2a_idx'),
            models.Index(fields=['status'], name='experiments_status_8d0e41_idx'),
            models.Index(fields=['-created_at'], name='experiments_created_5b7a90_idx'),
        ]

    def __str__(self):
        return f"{self.command} #{self.pk} ({self.status})"

    def mark_completed(self, summary=None):
        if summary:
            self.summary = {**self.summary, **summary}
        self.status = 'Completed'
        self.save(update_fields=['status', 'summary', 'updated_at'])

    def mark_failed(self, message):
        self.status = 'Failed'
        self.error_message = message
        self.save(update_fields=['status', 'error_message', 'updated_at'])


class EvaluationRow(models.Model):
    """
    One (record, system) result of an evaluation report.

    ``si_sdri_db`` is derived from the two SI-SDR values on save.
    """

    SYSTEM_CHOICES = [
        ('neural_struct', 'Neural, microstructure'),
        ('neural_flat', 'Neural, flat control'),
        ('das', 'Delay-and-sum'),
        ('mvdr', 'MVDR'),
        ('identity', 'Identity (reference mixture)'),
    ]

    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name='rows',
        help_text="Evaluation run"
    )
    record_id = models.CharField(
        max_length=64,
        help_text="Manifest record id"
    )
    system = models.CharField(
        max_length=20,
        choices=SYSTEM_CHOICES,
        help_text="Evaluated system"
    )
    n_sectors = models.PositiveSmallIntegerField(
        help_text="Sector count of the query"
    )
    selected_sectors = models.PositiveIntegerField(
        help_text="Selected sectors bitmask (bit i-1 = sector i)"
    )
    n_selected = models.PositiveSmallIntegerField(
        default=1,
        help_text="Number of selected sectors"
    )
    input_si_sdr_db = models.FloatField(
        help_text="SI-SDR of the reference-mic mixture"
    )
    output_si_sdr_db = models.FloatField(
        help_text="SI-SDR of the system output"
    )
    si_sdri_db = models.FloatField(
        help_text="Calculated improvement (output - input)"
    )

    created_at = models.DateTimeField(
        auto_now_add=True,
        help_text="Row creation timestamp"
    )

    class Meta:
        ordering = ['id']
        verbose_name = 'Evaluation Row'
        verbose_name_plural = 'Evaluation Rows'
        constraints = [
            models.UniqueConstraint(fields=['run', 'record_id', 'system'], name='unique_row_per_system'),
        ]
        indexes = [
            models.Index(fields=['system'], name='experiments_system_c41d07_idx'),
            models.Index(fields=['n_sectors'], name='experiments_n_secto_e2a6b3_idx'),
        ]

    def __str__(self):
        return f"{self.record_id} / {self.system}"

    def calculate_improvement(self):
        return self.output_si_sdr_db - self.input_si_sdr_db

    def clean(self):
        """
        Raises:
            ValidationError: If si_sdri_db disagrees with output - input
        """
        super().clean()
        if self.si_sdri_db is not None and abs(self.si_sdri_db - self.calculate_improvement()) > SI_SDRI_TOLERANCE:
            raise ValidationError({
                'si_sdri_db': 'SI-SDRi must equal output minus input SI-SDR.'
            })

    def save(self, *args, **kwargs):
        self.si_sdri_db = self.calculate_improvement()
        super().save(*args, **kwargs)
