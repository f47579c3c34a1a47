import csv
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag

from mnist.services.idx_reader import LabelSet, write_idx_images, write_idx_labels
from mnist.services.loader import MnistPaths, load_mnist
from mnist.testing import make_synthetic_dataset, write_synthetic_mnist
from network.services.checkpoint import load_checkpoint
from optimizers.exceptions import ScheduleError
from optimizers.services.optimizer import Algorithm, OptimizerConfig
from optimizers.services.rules import ScheduleParams

from .exceptions import CheckpointGridError, ConfigurationError, EmptySummaryError
from .models import ExperimentRun, TrialResult
from .serializers import TrialConfigSerializer
from .services.artifacts import RESULTS_HEADER
from .services.configuration import read_config_file, resolve_values, validated
from .services.grids import ParameterGrid, default_grids, load_grid_file, resolve_grids
from .services.min_size import min_size_scan, scan_sizes
from .services.replay import replay_experiment
from .services.runner import run_trials, seed_list
from .services.speed_comparison import GridPointResult, select_best, speed_comparison
from .services.statistics import SummaryStats, median_curve, summarize
from .services.trainer import TrialConfig, TrialRecord, train_to_threshold

TRAIN = make_synthetic_dataset(200, seed=0)
TEST = make_synthetic_dataset(100, seed=1)


def make_trial(algorithm=Algorithm.SGD, **changes):
    """Synthetic-data trial: 20 updates per epoch, a checkpoint every 5"""
    optimizer = changes.pop('optimizer', None) or OptimizerConfig(algorithm, eta=0.5, eta0=1.0, alpha=10.0)
    values = dict(hidden_units=8, optimizer=optimizer, batch_size=10, accuracy_threshold=0.0,
                  max_epochs=1.0, eval_interval=5, seed=3)
    values.update(changes)
    return TrialConfig(**values)


def make_record(curve, epochs=None, seed=0):
    return TrialRecord(config=make_trial(seed=seed), curve=tuple(curve), epochs_to_threshold=epochs,
                       final_accuracy=curve[-1][1] if curve else 0.0)


class TrainToThresholdTestCase(SimpleTestCase):
    def test_threshold_zero_stops_at_first_checkpoint(self):
        record = train_to_threshold(make_trial(), TRAIN, TEST)
        self.assertEqual(len(record.curve), 1)
        self.assertEqual(record.epochs_to_threshold, 0.25)
        self.assertTrue(record.reached)

    def test_zero_budget(self):
        record = train_to_threshold(make_trial(max_epochs=0.0), TRAIN, TEST)
        self.assertEqual(record.curve, ())
        self.assertFalse(record.reached)
        self.assertTrue(0.0 <= record.final_accuracy <= 1.0)

    def test_identical_runs(self):
        first = train_to_threshold(make_trial(accuracy_threshold=0.9), TRAIN, TEST)
        second = train_to_threshold(make_trial(accuracy_threshold=0.9), TRAIN, TEST)
        self.assertEqual(first, second)
        for a, b in zip(first.network.weights, second.network.weights):
            np.testing.assert_array_equal(a, b)

    def test_curve_times_and_first_crossing(self):
        config = make_trial(accuracy_threshold=0.5, stop_at_threshold=False)
        record = train_to_threshold(config, TRAIN, TEST)
        times = [t for t, _ in record.curve]
        self.assertEqual(times, [0.25, 0.5, 0.75, 1.0])
        crossings = [t for t, acc in record.curve if acc >= 0.5]
        self.assertEqual(record.epochs_to_threshold, crossings[0] if crossings else None)

    def test_partial_epoch_budget(self):
        config = make_trial(accuracy_threshold=1.0, max_epochs=0.5, stop_at_threshold=False)
        record = train_to_threshold(config, TRAIN, TEST)
        self.assertEqual([t for t, _ in record.curve], [0.25, 0.5])

    def test_dlr_records_traces_at_checkpoints(self):
        record = train_to_threshold(make_trial(Algorithm.DLR_PRE, stop_at_threshold=False), TRAIN, TEST)
        self.assertEqual([trace.layer_id for trace in record.traces], [1, 2])
        for trace in record.traces:
            self.assertEqual(list(trace.times), [t for t, _ in record.curve])
            self.assertTrue(np.all(trace.rates > 0))
            self.assertTrue(np.all(trace.rates <= 1.0))

    def test_sgd_has_no_traces(self):
        self.assertEqual(train_to_threshold(make_trial(), TRAIN, TEST).traces, ())

    def test_constant_schedule_matches_sgd(self):
        schedules = (ScheduleParams.constant(0.5), ScheduleParams.constant(0.5))
        scheduled = make_trial(optimizer=OptimizerConfig(Algorithm.SCHEDULED, schedules=schedules),
                               stop_at_threshold=False)
        sgd = make_trial(stop_at_threshold=False)
        a = train_to_threshold(scheduled, TRAIN, TEST)
        b = train_to_threshold(sgd, TRAIN, TEST)
        self.assertEqual(a.curve, b.curve)
        for wa, wb in zip(a.network.weights, b.network.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_invalid_threshold(self):
        with self.assertRaises(ConfigurationError):
            train_to_threshold(make_trial(accuracy_threshold=1.5), TRAIN, TEST)

    def test_small_alpha_warns(self):
        optimizer = OptimizerConfig(Algorithm.DLR_PRE, eta0=1.0, alpha=0.01)
        with self.assertLogs('optimizers.services.optimizer', 'WARNING'):
            train_to_threshold(make_trial(optimizer=optimizer), TRAIN, TEST)


class SummarizeTestCase(SimpleTestCase):
    def test_hand_arithmetic(self):
        stats = summarize([2.0, 4.0, 6.0])
        self.assertEqual((stats.count, stats.mean, stats.std, stats.median), (3, 4.0, 2.0, 4.0))

    def test_single_value(self):
        stats = summarize([5.0])
        self.assertEqual((stats.mean, stats.std, stats.median), (5.0, None, 5.0))
        self.assertTrue(stats.degenerate)

    def test_empty(self):
        with self.assertRaises(EmptySummaryError):
            summarize([])

    def test_not_reached_counted_separately(self):
        stats = summarize([1.0, None, 3.0])
        self.assertEqual((stats.count, stats.not_reached, stats.mean), (2, 1, 2.0))

    def test_all_not_reached(self):
        self.assertEqual(summarize([None, None]), SummaryStats(count=0, not_reached=2))


class MedianCurveTestCase(SimpleTestCase):
    def test_single_record(self):
        curve = [(0.25, 0.3), (0.5, 0.6)]
        self.assertEqual(median_curve([make_record(curve)]), curve)

    def test_odd_count(self):
        records = [make_record([(0.25, v), (0.5, v)]) for v in (0.1, 0.5, 0.9)]
        self.assertEqual(median_curve(records), [(0.25, 0.5), (0.5, 0.5)])

    def test_even_count_takes_mean(self):
        records = [make_record([(0.25, 0.2)]), make_record([(0.25, 0.4)])]
        self.assertAlmostEqual(median_curve(records)[0][1], 0.3)

    def test_truncates_to_shortest(self):
        records = [make_record([(0.25, 0.2), (0.5, 0.3)]), make_record([(0.25, 0.4)])]
        self.assertEqual(len(median_curve(records)), 1)

    def test_mismatched_grids(self):
        with self.assertRaises(CheckpointGridError):
            median_curve([make_record([(0.25, 0.2)]), make_record([(0.3, 0.4)])])


class GridTestCase(SimpleTestCase):
    def test_default_grid_sizes(self):
        grids = default_grids()
        self.assertEqual(len(grids[Algorithm.SGD]), 5)
        self.assertEqual(len(grids[Algorithm.NESTEROV]), 15)
        self.assertEqual(len(grids[Algorithm.ADAM]), 12)
        self.assertEqual(len(grids[Algorithm.DLR_PRE]), 20)

    def test_points_ignore_written_order(self):
        a = ParameterGrid.from_mapping('sgd', {'eta': [1.0, 0.1, 0.3]}).points()
        b = ParameterGrid.from_mapping('sgd', {'eta': [0.3, 1.0, 0.1]}).points()
        self.assertEqual(a, b)
        self.assertEqual([config.eta for config in a], [0.1, 0.3, 1.0])

    def test_points_sort_numerically(self):
        points = ParameterGrid.from_mapping('dlr-pre', {'alpha': [30, 3, 10], 'eta0': [1.0]}).points()
        self.assertEqual([config.alpha for config in points], [3.0, 10.0, 30.0])

    def test_unknown_parameter(self):
        with self.assertRaises(ConfigurationError):
            ParameterGrid.from_mapping('sgd', {'alpha': [1.0]})

    def test_invalid_point(self):
        with self.assertRaises(ConfigurationError):
            ParameterGrid.from_mapping('nesterov', {'mu': [1.5]}).points()

    def test_grid_file_replaces_default(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'grid.env'
            path.write_text('sgd.eta = 0.1,0.3\ndlr-pre.alpha = 10\n')
            grids = resolve_grids([Algorithm.SGD, Algorithm.DLR_PRE, Algorithm.ADAM], path)
        self.assertEqual([c.eta for c in grids[Algorithm.SGD]], [0.1, 0.3])
        self.assertEqual(len(grids[Algorithm.DLR_PRE]), 1)
        self.assertEqual(len(grids[Algorithm.ADAM]), 12)

    def test_malformed_grid_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'grid.env'
            path.write_text('eta = 0.1\n')
            with self.assertRaises(ConfigurationError):
                load_grid_file(path)


class RunnerTestCase(SimpleTestCase):
    def test_seed_list(self):
        self.assertEqual(seed_list(5, 3), [5, 6, 7])

    def test_parallel_matches_sequential(self):
        configs = [make_trial(accuracy_threshold=0.9, seed=seed) for seed in seed_list(0, 3)]
        sequential = run_trials(configs, TRAIN, TEST, workers=1)
        parallel = run_trials(configs, TRAIN, TEST, workers=2)
        self.assertEqual(sequential, parallel)

    def test_network_kept_only_on_request(self):
        config = make_trial()
        self.assertIsNone(run_trials([config], TRAIN, TEST)[0].network)
        self.assertIsNotNone(run_trials([config], TRAIN, TEST, keep_network=True)[0].network)


class SpeedComparisonTestCase(SimpleTestCase):
    def test_single_point_echoes_trials(self):
        grids = {Algorithm.SGD: [OptimizerConfig(Algorithm.SGD, eta=0.5)]}
        template = make_trial(accuracy_threshold=0.5, max_epochs=3.0)
        rows = speed_comparison(grids, [8], [0, 1, 2], template, TRAIN, TEST)
        self.assertEqual(len(rows), 1)
        direct = [train_to_threshold(template.with_changes(seed=s), TRAIN, TEST).epochs_to_threshold
                  for s in (0, 1, 2)]
        self.assertEqual(rows[0].stats, summarize(direct))

    def test_sgd_ratio_is_one(self):
        grids = {
            Algorithm.SGD: [OptimizerConfig(Algorithm.SGD, eta=0.5)],
            Algorithm.DLR_PRE: [OptimizerConfig(Algorithm.DLR_PRE, eta0=1.0, alpha=10.0)],
        }
        rows = speed_comparison(grids, [4, 8], [0, 1], make_trial(), TRAIN, TEST)
        self.assertEqual([(r.algorithm, r.hidden_units) for r in rows],
                         [(Algorithm.SGD, 4), (Algorithm.SGD, 8), (Algorithm.DLR_PRE, 4), (Algorithm.DLR_PRE, 8)])
        for row in rows:
            self.assertEqual(row.ratio_to_sgd, 1.0)

    def test_never_reached_is_a_result(self):
        grids = {Algorithm.SGD: [OptimizerConfig(Algorithm.SGD, eta=0.5)]}
        rows = speed_comparison(grids, [8], [0], make_trial(max_epochs=0.0), TRAIN, TEST)
        self.assertFalse(rows[0].reached)
        self.assertIsNone(rows[0].ratio_to_sgd)

    def test_empty_sizes(self):
        grids = {Algorithm.SGD: [OptimizerConfig(Algorithm.SGD)]}
        with self.assertRaises(ConfigurationError):
            speed_comparison(grids, [], [0], make_trial(), TRAIN, TEST)

    def test_best_point_is_order_independent(self):
        def point(eta, values):
            return GridPointResult(optimizer=OptimizerConfig(Algorithm.SGD, eta=eta), hidden_units=8,
                                   records=(), stats=summarize(values))
        points = [point(0.3, [1.0, 2.0]), point(0.1, [1.0, 2.0]), point(1.0, [0.5, None]), point(3.0, [2.0, 3.0])]
        for order in (points, points[::-1], points[1:] + points[:1]):
            self.assertEqual(select_best(order).optimizer.eta, 0.1)

    def test_tie_goes_to_smaller_value(self):
        points = [
            GridPointResult(optimizer=OptimizerConfig(Algorithm.SGD, eta=eta), hidden_units=8,
                            records=(), stats=summarize([1.0, 2.0]))
            for eta in (10.0, 3.0)
        ]
        self.assertEqual(select_best(points).optimizer.eta, 3.0)


class MinSizeTestCase(SimpleTestCase):
    def test_scan_sizes(self):
        self.assertEqual(scan_sizes(10, 3), [10, 7, 4, 1])

    def test_threshold_zero_reaches_floor(self):
        grids = {Algorithm.SGD: [OptimizerConfig(Algorithm.SGD, eta=0.5)]}
        result, = min_size_scan(grids, [0, 1], 5, 2, make_trial(max_epochs=0.5), TRAIN, TEST)
        self.assertEqual([o.hidden_units for o in result.outcomes], [5, 3, 1])
        self.assertEqual(result.minimal_size, 1)
        self.assertEqual(result.per_seed_sizes, (1, 1))
        self.assertEqual(result.per_seed_stats.mean, 1.0)

    def test_zero_budget_fails_at_start(self):
        grids = {Algorithm.SGD: [OptimizerConfig(Algorithm.SGD, eta=0.5)]}
        result, = min_size_scan(grids, [0, 1], 5, 2, make_trial(max_epochs=0.0), TRAIN, TEST)
        self.assertTrue(result.start_fails)
        self.assertIsNone(result.minimal_size)
        self.assertEqual(len(result.outcomes), 1)
        self.assertEqual(result.per_seed_stats.count, 0)


class ReplayTestCase(SimpleTestCase):
    def test_requires_dlr(self):
        with self.assertRaises(ConfigurationError):
            replay_experiment(make_trial(), [0], TRAIN, TEST)

    def test_single_seed_replay(self):
        trial = make_trial(Algorithm.DLR_PRE, eval_interval=2)
        result = replay_experiment(trial, [4], TRAIN, TEST, trace_epochs=1.0, seed_offset=100, fit_starts=2)
        self.assertEqual([fit.layer_id for fit in result.fits], [1, 2])
        self.assertEqual(len(result.averaged_traces[0]), 10)
        replay, = result.replay_records
        self.assertIs(replay.config.optimizer.algorithm, Algorithm.SCHEDULED)
        self.assertEqual(replay.config.seed, 104)
        self.assertIsNone(result.dlr_stats.std)
        self.assertTrue(replay.reached)


class ConfigurationTestCase(SimpleTestCase):
    def test_layering(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.env'
            path.write_text('hidden_units = 6\nthreshold = 0.9\n')
            values = resolve_values({'algorithm': 'sgd'}, path, flags={'hidden_units': 7, 'seed': None})
        self.assertEqual(values['hidden_units'], 7)
        self.assertEqual(values['threshold'], '0.9')
        self.assertEqual(values['batch_size'], settings.DLRLAB_BATCH_SIZE)

    def test_unknown_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.env'
            path.write_text('hiden_units = 6\n')
            with self.assertRaises(ConfigurationError):
                read_config_file(path)

    def test_missing_config_file(self):
        with self.assertRaises(ConfigurationError):
            read_config_file('/nonexistent/run.env')

    def test_schedule_must_stay_positive(self):
        values = resolve_values({'algorithm': 'scheduled', 'schedule1': '-1,0,0,0', 'schedule2': '0,0,0,0.1'})
        with self.assertRaises(ConfigurationError) as ctx:
            validated(TrialConfigSerializer, values)
        self.assertIn('not positive', str(ctx.exception))

    def test_schedule_checked_over_budget(self):
        values = resolve_values({'algorithm': 'scheduled', 'schedule1': '1,0,-1,-0.2',
                                 'schedule2': '0,0,0,0.1', 'max_epochs': 0.5})
        self.assertIsNotNone(validated(TrialConfigSerializer, values).validated_data['optimizer'])
        with self.assertRaises(ConfigurationError):
            validated(TrialConfigSerializer, dict(values, max_epochs=5.0))


class CommandTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        self.data_dir = self.root / 'data'
        self.data_dir.mkdir()
        write_synthetic_mnist(self.data_dir, train_count=200, test_count=100)

    def run_command(self, name, out='out', **options):
        values = dict(out=str(self.root / out), data_dir=str(self.data_dir), batch=10, eval_interval=5,
                      hidden=8, threshold=0.0, max_epochs=1.0, verbosity=0)
        values.update(options)
        values = {key: value for key, value in values.items() if value is not None}
        call_command(name, **values)
        return self.root / out

    def assertExitCode(self, code, name, **options):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(name, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception

    def read_json(self, path):
        return json.loads(Path(path).read_text())

    def test_train_writes_artifacts(self):
        out = self.run_command('train', algo='dlr-pre', eta0=1.0, alpha=10.0)
        for name in ('run_manifest.json', 'summary.json', 'results.csv', 'curves.csv',
                     'rate_traces.csv', 'weights.dlrw'):
            self.assertTrue((out / name).is_file(), name)
        summary = self.read_json(out / 'summary.json')
        self.assertTrue(summary['reached'])
        self.assertEqual(summary['epochs_to_threshold'], 0.25)
        net, seed = load_checkpoint(out / 'weights.dlrw')
        self.assertEqual((net.input_units, net.hidden_units, seed), (4, 8, 0))
        with open(out / 'results.csv', newline='') as f:
            rows = list(csv.reader(f))
        self.assertEqual(tuple(rows[0]), RESULTS_HEADER)
        self.assertEqual(rows[1][:3], ['train', 'dlr-pre', '8'])

    def test_train_not_reached_exits_2(self):
        self.assertExitCode(2, 'train', algo='sgd', max_epochs=0.0)
        self.assertFalse(self.read_json(self.root / 'out' / 'summary.json')['reached'])

    def test_missing_images_file(self):
        os.remove(self.data_dir / 't10k-images-idx3-ubyte')
        error = self.assertExitCode(1, 'train')
        self.assertIn('t10k-images-idx3-ubyte', str(error))

    def test_image_and_label_counts_differ(self):
        dataset = make_synthetic_dataset(5, seed=7)
        with open(self.data_dir / 't10k-images-idx3-ubyte', 'wb') as sink:
            write_idx_images(dataset.images, sink)
        with open(self.data_dir / 't10k-labels-idx1-ubyte', 'wb') as sink:
            write_idx_labels(LabelSet(labels=dataset.labels.labels[:4]), sink)
        error = self.assertExitCode(1, 'train')
        self.assertIn('does not match label count', str(error))
        self.assertFalse((self.root / 'out' / 'run_manifest.json').exists())

    def test_negative_schedule_exits_1(self):
        error = self.assertExitCode(1, 'train', algo='scheduled', schedule1='-1,0,0,0', schedule2='0,0,0,0.1')
        self.assertIn('not positive', str(error))

    def test_constant_schedules_train(self):
        out = self.run_command('train', algo='scheduled', schedule1='0,0,0,0.5', schedule2='0,0,0,0.5')
        self.assertTrue(self.read_json(out / 'summary.json')['reached'])

    def test_threshold_out_of_range(self):
        error = self.assertExitCode(1, 'train', threshold=1.5)
        self.assertIn('threshold', str(error))

    def test_unknown_algorithm(self):
        self.assertExitCode(1, 'train', algo='rmsprop')

    def test_unknown_flag(self):
        with self.assertRaises(CommandError):
            call_command('train', '--bogus')

    def test_config_file_and_flag_override(self):
        config = self.root / 'run.env'
        config.write_text('hidden_units = 6\nalgorithm = sgd\neta = 0.3\n')
        out = self.run_command('train', config=str(config), hidden=None)
        summary = self.read_json(out / 'summary.json')
        self.assertEqual((summary['hidden_units'], summary['params']), (6, {'eta': 0.3}))
        out = self.run_command('train', out='out2', config=str(config), hidden=7)
        self.assertEqual(self.read_json(out / 'summary.json')['hidden_units'], 7)

    def test_manifest_rerun_is_bitwise_identical(self):
        first = self.root / 'out'
        second = self.root / 'rerun'
        for options in (dict(algo='dlr-post', threshold=0.95, max_epochs=2.0),
                        dict(manifest=str(first / 'run_manifest.json'), data_dir=None, batch=None, eval_interval=None,
                             hidden=None, threshold=None, max_epochs=None, out='rerun')):
            try:
                self.run_command('train', **options)
            except CommandError as e:
                self.assertEqual(e.returncode, 2)
        for name in ('results.csv', 'curves.csv', 'rate_traces.csv', 'summary.json', 'weights.dlrw'):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), name)

    def test_persist_stores_run(self):
        self.run_command('train', algo='sgd', persist=True)
        run = ExperimentRun.objects.get()
        self.assertEqual((run.command, run.status, run.trial_count), ('train', 'succeeded', 1))
        self.assertEqual(TrialResult.objects.get().epochs_to_threshold, 0.25)

    def test_persisted_run_marked_failed_on_config_error(self):
        self.assertExitCode(1, 'replay', algo='sgd', runs=1, persist=True)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, 'failed')
        self.assertIn('replay needs', run.summary['error'])
        self.assertEqual(run.trial_count, 0)

    def test_persisted_run_marked_failed_on_crash(self):
        with mock.patch('experiments.management.commands.train.run_trials',
                        side_effect=RuntimeError('worker died')):
            with self.assertRaises(RuntimeError):
                self.run_command('train', algo='sgd', persist=True)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, 'failed')
        self.assertEqual(run.summary, {'error': 'RuntimeError: worker died'})

    def test_compare_single_row(self):
        grid = self.root / 'grid.env'
        grid.write_text('sgd.eta = 0.5\n')
        out = self.run_command('compare', algo='sgd', sizes='8', runs=2, grid=str(grid))
        rows = self.read_json(out / 'summary.json')['rows']
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]['ratio_to_sgd'], 1.0)
        self.assertEqual(rows[0]['epochs_to_threshold']['count'], 2)

    def test_compare_empty_sizes(self):
        self.assertExitCode(1, 'compare', algo='sgd', sizes='', runs=1)

    def test_minsize_threshold_zero(self):
        grid = self.root / 'grid.env'
        grid.write_text('sgd.eta = 0.5\n')
        out = self.run_command('minsize', algo='sgd', start_size=3, size_step=1, runs=2, grid=str(grid),
                               max_epochs=0.5)
        result, = self.read_json(out / 'summary.json')['algorithms']
        self.assertEqual(result['minimal_size'], 1)
        self.assertFalse(result['start_fails'])

    def test_minsize_start_fails(self):
        grid = self.root / 'grid.env'
        grid.write_text('sgd.eta = 0.5\n')
        self.assertExitCode(2, 'minsize', algo='sgd', start_size=3, size_step=1, runs=1, grid=str(grid),
                            max_epochs=0.0)
        result, = self.read_json(self.root / 'out' / 'summary.json')['algorithms']
        self.assertTrue(result['start_fails'])

    def test_replay_single_seed(self):
        out = self.run_command('replay', algo='dlr-pre', runs=1, eval_interval=2, trace_epochs=1.0, fit_starts=2)
        summary = self.read_json(out / 'summary.json')
        self.assertTrue(summary['degenerate'])
        self.assertIsNone(summary['dlr']['std'])
        self.assertEqual(len(self.read_json(out / 'schedule_fit.json')['fits']), 2)
        self.assertTrue((out / 'median_curves.csv').is_file())

    def test_replay_rejects_non_dlr(self):
        self.assertExitCode(1, 'replay', algo='sgd', runs=1)

    def test_replay_short_trace_exits_2(self):
        # 0.2 epochs at eval_interval 2 leaves 2 checkpoints, too few to fit
        self.assertExitCode(2, 'replay', algo='dlr-pre', runs=1, eval_interval=2, trace_epochs=0.2)
        out = self.root / 'out'
        diagnostics = self.read_json(out / 'schedule_fit.json')
        self.assertFalse(diagnostics['converged'])
        self.assertIn('at least 8 samples', diagnostics['error'])
        self.assertFalse(self.read_json(out / 'summary.json')['schedule_fit']['converged'])
        self.assertFalse((out / 'results.csv').exists())

    def test_replay_schedule_invalid_over_budget_exits_2(self):
        with mock.patch('experiments.management.commands.replay.replay_experiment',
                        side_effect=ScheduleError('Layer 2: schedule is not positive at t=0.8 epochs')):
            self.assertExitCode(2, 'replay', algo='dlr-pre', runs=1)
        diagnostics = self.read_json(self.root / 'out' / 'schedule_fit.json')
        self.assertTrue(diagnostics['converged'])
        self.assertIn('Layer 2', diagnostics['error'])


MNIST_DIR = os.getenv('DLRLAB_DATA_DIR')


@tag('slow')
@unittest.skipUnless(MNIST_DIR and Path(MNIST_DIR).is_dir(), 'MNIST files not available (set DLRLAB_DATA_DIR)')
class MnistReproductionTestCase(SimpleTestCase):
    """Desk-scale MNIST runs; orderings are checked, exact values are not"""

    seeds = [0, 1, 2, 3, 4]

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.train, cls.test = load_mnist(MnistPaths.resolve(MNIST_DIR))
        cls.workers = max(1, min(len(cls.seeds), os.cpu_count() or 1))

    def template(self, **changes):
        values = dict(hidden_units=100, optimizer=OptimizerConfig(Algorithm.DLR_PRE, eta0=1.0, alpha=10.0),
                      batch_size=10, accuracy_threshold=0.96, max_epochs=5.0, eval_interval=100, seed=0)
        values.update(changes)
        return TrialConfig(**values)

    def dlr_grid(self):
        return ParameterGrid.from_mapping('dlr-pre', {'eta0': [1.0, 3.0], 'alpha': [1.0, 10.0]}).points()

    def test_dlr_speed(self):
        row, = speed_comparison({Algorithm.DLR_PRE: self.dlr_grid()}, [100], self.seeds,
                                self.template(), self.train, self.test, workers=self.workers)
        self.assertIsNotNone(row.stats.median)
        self.assertLessEqual(row.stats.median, 1.5)

    def test_replay_is_slower(self):
        row, = speed_comparison({Algorithm.DLR_PRE: self.dlr_grid()}, [100], self.seeds[:2],
                                self.template(), self.train, self.test, workers=self.workers)
        result = replay_experiment(self.template(optimizer=row.best.optimizer), self.seeds,
                                   self.train, self.test, workers=self.workers,
                                   trace_epochs=settings.DLRLAB_TRACE_EPOCHS)
        self.assertTrue(result.dlr_faster)

    def test_min_size_ordering(self):
        grids = {
            Algorithm.SGD: ParameterGrid.from_mapping('sgd', {'eta': [0.3, 1.0, 3.0]}).points(),
            Algorithm.DLR_PRE: self.dlr_grid(),
        }
        sgd, dlr = min_size_scan(grids, self.seeds, 60, 4, self.template(max_epochs=30.0),
                                 self.train, self.test, workers=self.workers)
        self.assertFalse(sgd.start_fails or dlr.start_fails)
        self.assertLessEqual(dlr.minimal_size, sgd.minimal_size)
