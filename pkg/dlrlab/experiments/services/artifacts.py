"""
Artifact Writer

Writes the files a command run leaves in its output directory. Only the
coordinating process writes, after all trials are collected (the manifest
is written first, before any trial). Nothing time-dependent is written, so
single-worker reruns reproduce every numeric file bitwise.
"""

from pathlib import Path
from typing import Iterable, List, Mapping, Sequence
import csv
import json
import logging

from traces.services.rate_trace import RateTrace, export_trace

from .configuration import MANIFEST_FILENAME, RunManifest
from .trainer import TrialRecord

logger = logging.getLogger(__name__)

RESULTS_HEADER = (
    'experiment', 'algorithm', 'hidden_units', 'param_json', 'seed',
    'epochs_to_threshold', 'reached', 'final_accuracy',
)
CURVES_HEADER = ('run_id', 't_epochs', 'test_accuracy')
MEDIAN_HEADER = ('cohort', 't_epochs', 'median_accuracy')


def param_json(record: TrialRecord) -> str:
    return json.dumps(record.config.optimizer.tuned_params(), sort_keys=True)


def result_row(experiment: str, record: TrialRecord) -> List[str]:
    config = record.config
    return [
        experiment,
        config.optimizer.algorithm.value,
        str(config.hidden_units),
        param_json(record),
        str(config.seed),
        repr(record.epochs_to_threshold) if record.reached else '',
        'true' if record.reached else 'false',
        repr(record.final_accuracy),
    ]


def curve_run_id(experiment: str, record: TrialRecord) -> str:
    params = record.config.optimizer.tuned_params()
    suffix = ''.join(f"-{name}={value!r}" for name, value in sorted(params.items()) if not name.startswith('schedule'))
    return f"{experiment}-{record.run_id}{suffix}"


class ArtifactWriter:
    """Writes CSV and JSON files into one output directory"""

    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def write_rows(self, name: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
        path = self.path(name)
        with path.open('w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            if header:
                writer.writerow(header)
            writer.writerows(rows)
        logger.debug(f"Wrote {path}")
        return path

    def write_json(self, name: str, payload: Mapping[str, object]) -> Path:
        path = self.path(name)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')
        logger.debug(f"Wrote {path}")
        return path

    def write_manifest(self, manifest: RunManifest) -> Path:
        return self.write_json(MANIFEST_FILENAME, manifest.to_dict())

    def write_results(self, name: str, experiment_records: Iterable) -> Path:
        """experiment_records: (experiment, TrialRecord) pairs"""
        return self.write_rows(
            name, RESULTS_HEADER,
            (result_row(experiment, record) for experiment, record in experiment_records),
        )

    def write_curves(self, name: str, experiment_records: Iterable) -> Path:
        rows = []
        for experiment, record in experiment_records:
            run_id = curve_run_id(experiment, record)
            rows.extend([run_id, repr(t), repr(acc)] for t, acc in record.curve)
        return self.write_rows(name, CURVES_HEADER, rows)

    def write_median_curves(self, name: str, cohorts: Mapping[str, Sequence]) -> Path:
        rows = []
        for cohort, curve in cohorts.items():
            rows.extend([cohort, repr(t), repr(acc)] for t, acc in curve)
        return self.write_rows(name, MEDIAN_HEADER, rows)

    def write_traces(self, name: str, traces: Sequence[RateTrace]) -> Path:
        rows = []
        for index, trace in enumerate(traces):
            rows.extend(export_trace(trace, include_header=index == 0))
        if not traces:
            rows = export_trace(RateTrace(layer_id=1))[:1]
        return self.write_rows(name, (), rows)
