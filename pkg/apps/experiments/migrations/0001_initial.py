# Generated by Django 5.2.7 on 2026-10-17 09:00

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(help_text='Management command that produced this run', max_length=32)),
                ('config', models.JSONField(default=dict, help_text='Validated JSON config document (after flag overrides)')),
                ('config_sha256', models.CharField(help_text='SHA-256 of the canonical config JSON', max_length=64)),
                ('seed', models.BigIntegerField(default=0, help_text='Top-level seed')),
                ('prng_algorithm', models.CharField(help_text='Name of the pseudo-random generator', max_length=32)),
                ('artifact_version', models.CharField(help_text='Lab artifact version', max_length=32)),
                ('output_dir', models.CharField(help_text='Directory holding every output of the run', max_length=500)),
                ('status', models.CharField(choices=[('Running', 'Running'), ('Completed', 'Completed'), ('Failed', 'Failed')], default='Running', help_text='Run status', max_length=20)),
                ('summary', models.JSONField(blank=True, default=dict, help_text='Command-specific summary values')),
                ('error_message', models.TextField(blank=True, default='', help_text='Error text of a failed run')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='Run start timestamp')),
                ('updated_at', models.DateTimeField(auto_now=True, help_text='Last update timestamp')),
            ],
            options={
                'verbose_name': 'Experiment Run',
                'verbose_name_plural': 'Experiment Runs',
                'ordering': ['-created_at', '-id'],
                'indexes': [models.Index(fields=['command'], name='experiments_command_3f1c2a_idx'), models.Index(fields=['status'], name='experiments_status_8d0e41_idx'), models.Index(fields=['-created_at'], name='experiments_created_5b7a90_idx')],
            },
        ),
        migrations.CreateModel(
            name='EvaluationRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('record_id', models.CharField(help_text='Manifest record id', max_length=64)),
                ('system', models.CharField(choices=[('neural_struct', 'Neural, microstructure'), ('neural_flat', 'Neural, flat control'), ('das', 'Delay-and-sum'), ('mvdr', 'MVDR'), ('identity', 'Identity (reference mixture)')], help_text='Evaluated system', max_length=20)),
                ('n_sectors', models.PositiveSmallIntegerField(help_text='Sector count of the query')),
                ('selected_sectors', models.PositiveIntegerField(help_text='Selected sectors bitmask (bit i-1 = sector i)')),
                ('n_selected', models.PositiveSmallIntegerField(default=1, help_text='Number of selected sectors')),
                ('input_si_sdr_db', models.FloatField(help_text='SI-SDR of the reference-mic mixture')),
                ('output_si_sdr_db', models.FloatField(help_text='SI-SDR of the system output')),
                ('si_sdri_db', models.FloatField(help_text='Calculated improvement (output - input)')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='Row creation timestamp')),
                ('run', models.ForeignKey(help_text='Evaluation run', on_delete=django.db.models.deletion.CASCADE, related_name='rows', to='experiments.experimentrun')),
            ],
            options={
                'verbose_name': 'Evaluation Row',
                'verbose_name_plural': 'Evaluation Rows',
                'ordering': ['id'],
                'indexes': [models.Index(fields=['system'], name='experiments_system_c41d07_idx'), models.Index(fields=['n_sectors'], name='experiments_n_secto_e2a6b3_idx')],
                'constraints': [models.UniqueConstraint(fields=('run', 'record_id', 'system'), name='unique_row_per_system')],
            },
        ),
    ]
