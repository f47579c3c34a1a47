import numpy as np
from django.test import SimpleTestCase

from optimizers.services.rules import ScheduleParams

from .exceptions import NonIncreasingTimeError, ScheduleFitError, TraceError
from .services.rate_trace import RateTrace, average_traces, export_trace, import_trace_rows, record
from .services.schedule_fit import best_constant_sse, fit_schedule, fit_traces


def trace_from(layer_id, times, rates):
    return RateTrace(layer_id=layer_id, samples=tuple(zip(map(float, times), map(float, rates))))


class RecordTestCase(SimpleTestCase):
    def test_constant_matrix(self):
        trace = record(RateTrace(layer_id=1), 0.1, np.full((3, 4), 0.3))
        self.assertAlmostEqual(trace.samples[0][1], 0.3, places=15)

    def test_two_point_average(self):
        trace = record(RateTrace(layer_id=2), 0.1, np.array([[0.2, 0.4]]))
        self.assertAlmostEqual(trace.samples[0][1], 0.3, places=15)

    def test_equal_time_rejected(self):
        trace = record(RateTrace(layer_id=1), 0.5, np.ones((1, 1)))
        with self.assertRaises(NonIncreasingTimeError):
            record(trace, 0.5, np.ones((1, 1)))

    def test_recording_does_not_touch_rates(self):
        rates = np.array([[0.1, 0.2]])
        record(RateTrace(layer_id=1), 0.1, rates)
        np.testing.assert_array_equal(rates, [[0.1, 0.2]])


class ExportTestCase(SimpleTestCase):
    def test_empty_trace(self):
        self.assertEqual(export_trace(RateTrace(layer_id=1)), [['layer_id', 't_epochs', 'mean_rate']])

    def test_one_sample(self):
        rows = export_trace(trace_from(1, [0.1], [0.25]))
        self.assertEqual(rows[1], ['1', '0.1', '0.25'])

    def test_round_trip_exact(self):
        rng = np.random.default_rng(0)
        original = [
            trace_from(1, np.cumsum(rng.random(6)), rng.random(6)),
            trace_from(2, np.cumsum(rng.random(6)), rng.random(6)),
        ]
        rows = export_trace(original[0]) + export_trace(original[1], include_header=False)
        self.assertEqual(import_trace_rows(rows), original)


class AverageTestCase(SimpleTestCase):
    def test_truncates_to_shortest(self):
        first = trace_from(1, [0.1, 0.2, 0.3], [1.0, 2.0, 3.0])
        second = trace_from(1, [0.1, 0.2], [3.0, 4.0])
        averaged = average_traces([first, second])
        self.assertEqual(averaged.samples, ((0.1, 2.0), (0.2, 3.0)))

    def test_mismatched_grid(self):
        with self.assertRaises(TraceError):
            average_traces([trace_from(1, [0.1], [1.0]), trace_from(1, [0.2], [1.0])])


class FitScheduleTestCase(SimpleTestCase):
    def test_generate_and_refit(self):
        generator = ScheduleParams(0.5, -1.0, -0.5, 0.05)
        t = np.linspace(0.0, 2.0, 50)
        trace = trace_from(1, t, generator.evaluate(t))
        fit = fit_schedule(trace)
        np.testing.assert_allclose(fit.params.evaluate(t), generator.evaluate(t), rtol=0.01)
        self.assertLessEqual(fit.sse, best_constant_sse(trace))

    def test_constant_trace(self):
        t = np.linspace(0.05, 3.0, 20)
        trace = trace_from(2, t, np.full(20, 0.37))
        fit = fit_schedule(trace)
        np.testing.assert_allclose(fit.params.evaluate(t), 0.37, atol=1e-6)
        self.assertTrue(fit.converged)

    def test_never_worse_than_constant(self):
        rng = np.random.default_rng(11)
        for _ in range(3):
            t = np.sort(rng.uniform(0.01, 3.0, 15))
            trace = trace_from(1, t, rng.uniform(0.1, 1.0, 15))
            fit = fit_schedule(trace, starts=3)
            self.assertLessEqual(fit.sse, best_constant_sse(trace) * (1 + 1e-9))

    def test_deterministic(self):
        t = np.linspace(0.02, 1.5, 30)
        trace = trace_from(1, t, 0.3 * np.exp(-2 * t) + 0.1)
        self.assertEqual(fit_schedule(trace, seed=4), fit_schedule(trace, seed=4))

    def test_too_few_samples(self):
        with self.assertRaises(ScheduleFitError):
            fit_schedule(trace_from(1, [0.1, 0.2, 0.3], [0.3, 0.2, 0.1]))

    def test_fit_traces_reports_fits_so_far(self):
        good = trace_from(1, np.linspace(0.1, 1.0, 10), np.linspace(0.5, 0.2, 10))
        short = trace_from(2, [0.1, 0.2], [0.3, 0.2])
        with self.assertRaises(ScheduleFitError) as ctx:
            fit_traces([good, short])
        self.assertEqual([fit.layer_id for fit in ctx.exception.fits], [1])

    def test_to_dict_keys(self):
        t = np.linspace(0.1, 1.0, 10)
        fit = fit_schedule(trace_from(1, t, 0.2 + 0.1 * t), starts=2)
        self.assertEqual(
            set(fit.to_dict()), {'layer_id', 'a', 'b', 'c', 'd', 'sse', 'converged', 'iterations'}
        )
