"""
Tests for the fit_stats management command.
"""
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from apps.experiments.models import ExperimentRun
from apps.scenes.testing import small_dataset


class FitStatsCommandTests(TestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls._data = tempfile.TemporaryDirectory()
        cls.manifest = small_dataset(cls._data.name, with_array=False)

    @classmethod
    def tearDownClass(cls):
        cls._data.cleanup()
        super().tearDownClass()

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_command(self, document):
        config = self.tmp / 'fit.json'
        config.write_text(json.dumps(document))
        call_command('fit_stats', str(config), out=str(self.tmp / 'out'), stdout=StringIO())
        return self.tmp / 'out'

    def test_writes_stats(self):
        out = self.run_command({'manifest': str(self.manifest), 'max_records': 3})

        document = json.loads((out / 'norm_stats.json').read_text())
        self.assertEqual((document['window_len'], document['hop']), (288, 192))
        self.assertEqual(len(document['mean']), 3)
        self.assertEqual(len(document['var'][2]), 145)
        lines = (out / 'norm_stats.csv').read_text().splitlines()
        self.assertEqual(lines[0], 'bin,feature,mean,var')
        self.assertEqual(len(lines), 1 + 3 * 145)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, 'Completed')
        self.assertEqual(run.summary['bins'], 145)

    def test_custom_frame(self):
        out = self.run_command({'manifest': str(self.manifest), 'frame': {'window_len': 256, 'hop': 128}})
        document = json.loads((out / 'norm_stats.json').read_text())
        self.assertEqual(len(document['mean'][0]), 129)

    def test_missing_manifest(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command({'manifest': str(self.tmp / 'none.jsonl')})
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('manifest', str(ctx.exception))
