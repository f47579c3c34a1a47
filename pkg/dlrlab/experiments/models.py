from django.db import models
import uuid


class ExperimentRun(models.Model):
    """
    One invocation of an experiment command, stored when --persist is given.
    """
    COMMAND_CHOICES = [
        ('train', 'Train'),
        ('compare', 'Speed comparison'),
        ('minsize', 'Minimal size'),
        ('replay', 'Average-rate replay'),
    ]
    STATUS_CHOICES = [
        ('running', 'Running'),
        ('succeeded', 'Succeeded'),
        ('goal_not_met', 'Goal not met'),
        ('failed', 'Failed'),
    ]

    run_id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='running')
    output_dir = models.CharField(max_length=500)
    manifest = models.JSONField(default=dict, help_text="Resolved configuration, data paths and seeds")
    summary = models.JSONField(default=dict, blank=True)

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['command', 'status'], name='experiment_run_cmd_status_idx'),
        ]
        db_table = 'experiment_run'

    def __str__(self):
        return f"Run {str(self.run_id)[:8]} - {self.command} ({self.status})"

    @property
    def trial_count(self):
        return self.trials.count()

    def mark_finished(self, succeeded, summary=None):
        """Record the outcome and the summary written to disk"""
        self.status = 'succeeded' if succeeded else 'goal_not_met'
        if summary is not None:
            self.summary = summary
        self.save(update_fields=['status', 'summary', 'updated_at'])

    def mark_failed(self, error):
        """Record a run that stopped on an error before producing a summary"""
        self.status = 'failed'
        self.summary = {'error': error}
        self.save(update_fields=['status', 'summary', 'updated_at'])


class TrialResult(models.Model):
    """
    Outcome of a single seeded training trial within a run.
    """
    trial_id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='trials')
    experiment = models.CharField(max_length=20)
    algorithm = models.CharField(max_length=20)
    hidden_units = models.PositiveIntegerField()
    params = models.JSONField(default=dict)
    seed = models.BigIntegerField()
    epochs_to_threshold = models.FloatField(null=True, blank=True)
    reached = models.BooleanField(default=False)
    final_accuracy = models.FloatField()
    curve = models.JSONField(default=list, blank=True, help_text="[t_epochs, test_accuracy] pairs")

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['run', 'experiment', 'algorithm', 'hidden_units', 'seed']
        indexes = [
            models.Index(fields=['run', 'algorithm'], name='trial_result_run_algo_idx'),
        ]
        db_table = 'trial_result'

    def __str__(self):
        outcome = f"{self.epochs_to_threshold:.3f} epochs" if self.reached else "not reached"
        return f"{self.algorithm} h={self.hidden_units} seed={self.seed}: {outcome}"
