"""
Management command to train one network to the accuracy threshold
"""

from network.services.checkpoint import save_checkpoint

from ..base import ExperimentCommand, ExperimentOutcome
from ...services.runner import run_trials


class Command(ExperimentCommand):
    help = 'Train one seeded network until it reaches the test accuracy threshold'
    command_name = 'train'
    command_defaults = {'algorithm': 'dlr-pre'}

    def run_experiment(self, plan, train, test, writer):
        trial = plan.trial
        record = run_trials([trial], train, test, workers=1, keep_network=True)[0]
        records = [('train', record)]

        writer.write_results('results.csv', records)
        writer.write_curves('curves.csv', records)
        if record.traces:
            writer.write_traces('rate_traces.csv', record.traces)
        save_checkpoint(record.network, trial.seed, writer.path('weights.dlrw'))

        summary = {
            'experiment': 'train',
            'algorithm': trial.optimizer.algorithm.value,
            'hidden_units': trial.hidden_units,
            'params': trial.optimizer.tuned_params(),
            'seed': trial.seed,
            'threshold': trial.accuracy_threshold,
            'reached': record.reached,
            'epochs_to_threshold': record.epochs_to_threshold,
            'final_accuracy': record.final_accuracy,
            'checkpoints': len(record.curve),
        }
        if record.reached:
            message = (f"Reached {trial.accuracy_threshold:.2%} test accuracy after "
                       f"{record.epochs_to_threshold:.4f} epochs")
        else:
            message = (f"Did not reach {trial.accuracy_threshold:.2%} within {trial.max_epochs} epochs "
                       f"(final accuracy {record.final_accuracy:.4f})")
        return ExperimentOutcome(succeeded=record.reached, summary=summary, message=message, records=records)
