"""
Stores runs and their trials in the database (only with --persist)
"""

from typing import Iterable
import logging

from django.db import transaction

from ..models import ExperimentRun
from ..serializers import ExperimentRunSerializer, TrialResultSerializer
from .configuration import RunManifest

logger = logging.getLogger(__name__)


def start_run(manifest: RunManifest) -> ExperimentRun:
    serializer = ExperimentRunSerializer(data={
        'command': manifest.command,
        'output_dir': manifest.output_dir,
        'manifest': manifest.to_dict(),
    })
    serializer.is_valid(raise_exception=True)
    run = serializer.save()
    logger.info(f"Stored run {run.run_id}")
    return run


@transaction.atomic
def store_trials(run: ExperimentRun, experiment_records: Iterable) -> int:
    """experiment_records: (experiment, TrialRecord) pairs; returns the row count"""
    stored = 0
    for experiment, record in experiment_records:
        config = record.config
        serializer = TrialResultSerializer(data={
            'experiment': experiment,
            'algorithm': config.optimizer.algorithm.value,
            'hidden_units': config.hidden_units,
            'params': config.optimizer.tuned_params(),
            'seed': config.seed,
            'epochs_to_threshold': record.epochs_to_threshold,
            'reached': record.reached,
            'final_accuracy': record.final_accuracy,
            'curve': [list(point) for point in record.curve],
        })
        serializer.is_valid(raise_exception=True)
        serializer.save(run=run)
        stored += 1
    logger.info(f"Stored {stored} trial(s) for run {run.run_id}")
    return stored
