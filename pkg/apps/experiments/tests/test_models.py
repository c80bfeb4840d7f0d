"""
Tests for the experiments models and the run-summary signals.
"""
from django.core.exceptions import ValidationError
from django.test import TestCase

from apps.experiments.models import EvaluationRow
from apps.experiments.signals import refresh_run_summary

from .test_api import make_row, make_run


class EvaluationRowTests(TestCase):

    def setUp(self):
        self.run = make_run()

    def test_improvement_is_computed_on_save(self):
        row = make_row(self.run, 'mix-00000', 'das', -3.5, 2.25)
        row.refresh_from_db()
        self.assertEqual(row.si_sdri_db, 5.75)

    def test_clean_rejects_inconsistent_improvement(self):
        row = EvaluationRow(run=self.run, record_id='mix-00000', system='das', n_sectors=6,
                            selected_sectors=1, input_si_sdr_db=-3.0, output_si_sdr_db=2.0, si_sdri_db=4.0)
        with self.assertRaises(ValidationError):
            row.clean()
        row.si_sdri_db = 5.0
        row.clean()

    def test_status_transitions(self):
        self.run.mark_completed({'rows': 0})
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, 'Completed')
        self.assertEqual(self.run.summary['rows'], 0)
        self.run.mark_failed('boom')
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, 'Failed')
        self.assertEqual(self.run.error_message, 'boom')


class RunSummarySignalTests(TestCase):

    def setUp(self):
        self.run = make_run()

    def test_summary_follows_saved_rows(self):
        make_row(self.run, 'a', 'mvdr', 0.0, 2.0)
        make_row(self.run, 'b', 'mvdr', 0.0, -1.0)
        self.run.refresh_from_db()
        self.assertEqual(self.run.summary['row_count'], 2)
        self.assertAlmostEqual(self.run.summary['mean_si_sdri_db'], 0.5)
        self.assertEqual(self.run.summary['positive_fraction'], 0.5)

    def test_summary_follows_deleted_rows(self):
        row = make_row(self.run, 'a', 'mvdr', 0.0, 2.0)
        make_row(self.run, 'b', 'mvdr', 0.0, -1.0)
        row.delete()
        self.run.refresh_from_db()
        self.assertEqual(self.run.summary['row_count'], 1)
        self.assertEqual(self.run.summary['positive_fraction'], 0.0)

    def test_bulk_create_needs_explicit_refresh(self):
        EvaluationRow.objects.bulk_create([
            EvaluationRow(run=self.run, record_id=f'r{i}', system='identity', n_sectors=6, selected_sectors=1,
                          input_si_sdr_db=1.0, output_si_sdr_db=1.0, si_sdri_db=0.0)
            for i in range(3)
        ])
        self.run.refresh_from_db()
        self.assertNotIn('row_count', self.run.summary)
        refresh_run_summary(self.run)
        self.run.refresh_from_db()
        self.assertEqual(self.run.summary['row_count'], 3)
        self.assertEqual(self.run.summary['positive_fraction'], 0.0)

    def test_deleting_run_removes_rows(self):
        make_row(self.run, 'a', 'das', 0.0, 1.0)
        self.run.delete()
        self.assertEqual(EvaluationRow.objects.count(), 0)
