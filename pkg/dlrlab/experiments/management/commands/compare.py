"""
Management command for the training-speed comparison across algorithms
"""

from ..base import ExperimentCommand, ExperimentOutcome
from ...services.grids import resolve_grids
from ...services.speed_comparison import speed_comparison


class Command(ExperimentCommand):
    help = 'Compare epochs-to-threshold of tuned optimizers across network sizes'
    command_name = 'compare'
    command_defaults = {'algorithm': 'sgd,nesterov,adam,dlr-pre'}

    def add_experiment_arguments(self, parser):
        parser.add_argument('--sizes', type=str, help='Comma-separated hidden-layer sizes')
        parser.add_argument('--grid', type=str, help='Grid file with algorithm.param = v1,v2 lines')

    def run_experiment(self, plan, train, test, writer):
        grids = resolve_grids(plan.algorithms, plan.values.get('grid'), self.base_optimizers(plan))
        rows = speed_comparison(grids, plan.run_settings['sizes'], plan.seeds, plan.trial,
                                train, test, workers=plan.workers)

        records = [('compare', record) for row in rows for point in row.points for record in point.records]
        writer.write_results('results.csv', records)
        writer.write_curves('curves.csv', records)

        self.stdout.write(f"{'algorithm':<10} {'hidden':>6} {'mean':>8} {'std':>8} {'median':>8} {'ratio':>6}")
        for row in rows:
            stats = row.stats
            self.stdout.write(
                f"{row.algorithm.value:<10} {row.hidden_units:>6} {_fmt(stats.mean):>8} "
                f"{_fmt(stats.std):>8} {_fmt(stats.median):>8} {_fmt(row.ratio_to_sgd, 2):>6}"
            )

        summary = {
            'experiment': 'compare',
            'threshold': plan.trial.accuracy_threshold,
            'seeds': plan.seeds,
            'rows': [row.to_dict() for row in rows],
        }
        missing = [f"{row.algorithm.value} h={row.hidden_units}" for row in rows if not row.reached]
        if missing:
            message = f"No grid point reached the threshold for: {', '.join(missing)}"
        else:
            message = f"Compared {len(rows)} algorithm/size combinations"
        return ExperimentOutcome(succeeded=not missing, summary=summary, message=message, records=records)


def _fmt(value, digits=3):
    return '-' if value is None else f"{value:.{digits}f}"
