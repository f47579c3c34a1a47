"""
Management command for the minimal-network-size scan
"""

from ..base import ExperimentCommand, ExperimentOutcome
from ...services.grids import resolve_grids
from ...services.min_size import min_size_scan


class Command(ExperimentCommand):
    help = 'Shrink the hidden layer until each algorithm stops reaching the threshold'
    command_name = 'minsize'
    command_defaults = {'algorithm': 'sgd,nesterov,adam,dlr-pre'}

    def add_experiment_arguments(self, parser):
        parser.add_argument('--start-size', type=int, help='First hidden-layer size scanned')
        parser.add_argument('--size-step', type=int, help='Decrement between scanned sizes')
        parser.add_argument('--grid', type=str, help='Grid file with algorithm.param = v1,v2 lines')

    def run_experiment(self, plan, train, test, writer):
        grids = resolve_grids(plan.algorithms, plan.values.get('grid'), self.base_optimizers(plan))
        results = min_size_scan(
            grids, plan.seeds, plan.run_settings['start_size'], plan.run_settings['size_step'],
            plan.trial, train, test, workers=plan.workers,
        )

        records = [
            ('minsize', record)
            for result in results
            for outcome in result.outcomes
            for record in outcome.best.records
        ]
        writer.write_results('results.csv', records)

        for result in results:
            if result.start_fails:
                self.stdout.write(f"{result.algorithm.value:<10} start size {result.start_size} fails")
                continue
            stats = result.per_seed_stats
            spread = f" +/- {stats.std:.1f}" if stats.std is not None else ''
            per_seed = f"{stats.mean:.1f}{spread}" if stats.mean is not None else '-'
            self.stdout.write(
                f"{result.algorithm.value:<10} minimal size {result.minimal_size} (per seed {per_seed})"
            )

        summary = {
            'experiment': 'minsize',
            'threshold': plan.trial.accuracy_threshold,
            'max_epochs': plan.trial.max_epochs,
            'seeds': plan.seeds,
            'algorithms': [result.to_dict() for result in results],
        }
        failed = [result.algorithm.value for result in results if result.start_fails]
        if failed:
            message = f"Start size fails for: {', '.join(failed)}"
        else:
            message = 'Minimal sizes: ' + ', '.join(f"{r.algorithm.value}={r.minimal_size}" for r in results)
        return ExperimentOutcome(succeeded=not failed, summary=summary, message=message, records=records)
