"""
Django signals for the experiments app.

Keeps an evaluation run's summary (row count, mean SI-SDRi, fraction of
positive enhancements) in step with its rows.
"""
import logging

from django.db.models import Avg, Count, Q
from django.db.models.signals import post_delete, post_save
from django.dispatch import receiver

from apps.experiments.models import EvaluationRow, ExperimentRun

logger = logging.getLogger(__name__)


def refresh_run_summary(run):
    """
    Recalculate row statistics of ``run``.

    Called by the signal below and directly after ``bulk_create``, which
    does not send signals.
    """
    stats = run.rows.aggregate(
        row_count=Count('id'),
        mean_si_sdri_db=Avg('si_sdri_db'),
        positive=Count('id', filter=Q(si_sdri_db__gt=0)),
    )
    count = stats['row_count']
    summary = dict(run.summary)
    summary.update({
        'row_count': count,
        'mean_si_sdri_db': stats['mean_si_sdri_db'],
        'positive_fraction': stats['positive'] / count if count else None,
    })
    if summary != run.summary:
        run.summary = summary
        run.save(update_fields=['summary', 'updated_at'])
        logger.debug(f"Run {run.pk} summary updated: {count} rows")


@receiver(post_save, sender=EvaluationRow)
@receiver(post_delete, sender=EvaluationRow)
def update_run_summary(sender, instance, **kwargs):
    """
    Args:
        sender: The model class (EvaluationRow)
        instance: The row being saved/deleted
        **kwargs: Additional signal arguments
    """
    # the run itself is going away
    if isinstance(kwargs.get('origin'), ExperimentRun):
        return
    refresh_run_summary(instance.run)
