# Generated by Django 5.2.5 on 2026-10-18 10:00

import django.db.models.deletion
import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('run_id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('command', models.CharField(choices=[('train', 'Train'), ('compare', 'Speed comparison'), ('minsize', 'Minimal size'), ('replay', 'Average-rate replay')], max_length=20)),
                ('status', models.CharField(choices=[('running', 'Running'), ('succeeded', 'Succeeded'), ('goal_not_met', 'Goal not met')], default='running', max_length=20)),
                ('output_dir', models.CharField(max_length=500)),
                ('manifest', models.JSONField(default=dict, help_text='Resolved configuration, data paths and seeds')),
                ('summary', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'db_table': 'experiment_run',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['command', 'status'], name='experiment_run_cmd_status_idx')],
            },
        ),
        migrations.CreateModel(
            name='TrialResult',
            fields=[
                ('trial_id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('experiment', models.CharField(max_length=20)),
                ('algorithm', models.CharField(max_length=20)),
                ('hidden_units', models.PositiveIntegerField()),
                ('params', models.JSONField(default=dict)),
                ('seed', models.BigIntegerField()),
                ('epochs_to_threshold', models.FloatField(blank=True, null=True)),
                ('reached', models.BooleanField(default=False)),
                ('final_accuracy', models.FloatField()),
                ('curve', models.JSONField(blank=True, default=list, help_text='[t_epochs, test_accuracy] pairs')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='trials', to='experiments.experimentrun')),
            ],
            options={
                'db_table': 'trial_result',
                'ordering': ['run', 'experiment', 'algorithm', 'hidden_units', 'seed'],
                'indexes': [models.Index(fields=['run', 'algorithm'], name='trial_result_run_algo_idx')],
            },
        ),
    ]
