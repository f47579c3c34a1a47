"""
Management command for the DLR versus average-rate replay experiment
"""

from optimizers.exceptions import ScheduleError
from traces.exceptions import ScheduleFitError

from ..base import ExperimentCommand, ExperimentOutcome
from ...exceptions import ConfigurationError
from ...services.replay import replay_experiment


class Command(ExperimentCommand):
    help = 'Train DLR networks, fit their mean layer rates, and retrain with those schedules'
    command_name = 'replay'
    command_defaults = {'algorithm': 'dlr-pre'}

    def add_experiment_arguments(self, parser):
        parser.add_argument('--trace-epochs', type=float, help='Epochs the DLR cohort trains while recording rates')
        parser.add_argument('--fit-starts', type=int, help='Nelder-Mead starts per layer fit')
        parser.add_argument('--replay-seed-offset', type=int, help='Offset added to seeds for the replay cohort')

    def run_experiment(self, plan, train, test, writer):
        if not plan.trial.optimizer.algorithm.is_dlr:
            raise ConfigurationError(
                f"algorithm: replay needs dlr-pre or dlr-post, got {plan.trial.optimizer.algorithm.value}"
            )
        settings = plan.run_settings
        try:
            result = replay_experiment(
                plan.trial, plan.seeds, train, test, workers=plan.workers,
                trace_epochs=settings['trace_epochs'],
                seed_offset=settings['replay_seed_offset'], fit_starts=settings['fit_starts'],
            )
        except ScheduleFitError as e:
            diagnostics = {'converged': False, 'error': str(e), 'fits': [fit.to_dict() for fit in e.fits]}
            writer.write_json('schedule_fit.json', diagnostics)
            return ExperimentOutcome(succeeded=False, summary={'experiment': 'replay', 'schedule_fit': diagnostics},
                                     message=f"Schedule fit failed: {e}")
        except ScheduleError as e:
            diagnostics = {'converged': True, 'error': str(e)}
            writer.write_json('schedule_fit.json', diagnostics)
            return ExperimentOutcome(succeeded=False, summary={'experiment': 'replay', 'schedule_fit': diagnostics},
                                     message=f"Fitted schedule is invalid over the training horizon: {e}")

        records = ([('replay-dlr', record) for record in result.dlr_records]
                   + [('replay-scheduled', record) for record in result.replay_records])
        writer.write_results('results.csv', records)
        writer.write_curves('curves.csv', records)
        writer.write_median_curves('median_curves.csv', {
            'dlr': result.dlr_median_curve,
            'replay': result.replay_median_curve,
        })
        writer.write_traces('rate_traces.csv', result.averaged_traces)
        writer.write_json('schedule_fit.json', {'converged': True, 'fits': [fit.to_dict() for fit in result.fits]})

        dlr, replay = result.dlr_stats, result.replay_stats
        self.stdout.write(f"DLR cohort median:    {_fmt(dlr.median)} epochs ({dlr.count}/{len(plan.seeds)} reached)")
        self.stdout.write(f"Replay cohort median: {_fmt(replay.median)} epochs ({replay.count}/{len(plan.seeds)} reached)")

        summary = dict(result.to_dict(), experiment='replay', threshold=plan.trial.accuracy_threshold,
                       seeds=plan.seeds, degenerate=len(plan.seeds) < 2)
        return ExperimentOutcome(succeeded=True, summary=summary,
                                 message=f"Replay finished; DLR faster: {result.dlr_faster}", records=records)


def _fmt(value):
    return '-' if value is None else f"{value:.4f}"
