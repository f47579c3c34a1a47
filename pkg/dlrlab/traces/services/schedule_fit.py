"""
Schedule Fitting Service

Fits a * exp(b * t^(1/3) + c * t) + d to a recorded mean-rate trace by
least squares, minimized with Nelder-Mead from several seeded starts. The
fitted curve is the contract, not the parameters: (a, d) and (b, c) can
trade off almost freely.

The fit runs in normalized units (rates divided by their largest value,
time divided by the trace's last t) and is mapped back afterwards.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional
import logging

import numpy as np
from scipy.optimize import minimize

from optimizers.exceptions import ScheduleError
from optimizers.services.rules import ScheduleParams

from ..exceptions import ScheduleFitError
from .rate_trace import RateTrace

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8
DEFAULT_STARTS = 8
MAX_RESTARTS = 10
XATOL = 1e-9
FATOL = 1e-14
MAXITER = 20_000
INVALID_PENALTY = 1e6


@dataclass(frozen=True)
class FitResult:
    layer_id: int
    params: ScheduleParams
    sse: float
    converged: bool
    iterations: int

    def to_dict(self) -> Dict[str, object]:
        a, b, c, d = self.params.as_tuple()
        return {
            'layer_id': self.layer_id,
            'a': a, 'b': b, 'c': c, 'd': d,
            'sse': self.sse,
            'converged': self.converged,
            'iterations': self.iterations,
        }


def schedule_curve(theta: np.ndarray, u: np.ndarray) -> np.ndarray:
    a, b, c, d = theta
    with np.errstate(over='ignore', invalid='ignore'):
        return a * np.exp(b * np.cbrt(u) + c * u) + d


def _objective(theta: np.ndarray, u: np.ndarray, y: np.ndarray) -> float:
    predicted = schedule_curve(theta, u)
    if not np.all(np.isfinite(predicted)):
        return INVALID_PENALTY * (1.0 + float(np.sum(y ** 2)))
    sse = float(np.sum((y - predicted) ** 2))
    negative = predicted[predicted <= 0]
    if negative.size:
        sse += INVALID_PENALTY * (1.0 + float(np.sum(negative ** 2)))
    return sse


def _starting_points(y: np.ndarray, starts: int, seed: int) -> List[np.ndarray]:
    head, tail = float(y[0]), float(y[-1])
    points = [
        np.array([0.0, 0.0, 0.0, float(np.mean(y))]),
        np.array([head - tail, -1.0, 0.0, tail]),
        np.array([head - tail, 0.0, -3.0, tail]),
    ]
    rng = np.random.default_rng(seed)
    while len(points) < starts:
        points.append(np.array([
            (head - tail) * rng.uniform(0.5, 1.5),
            rng.uniform(-3.0, 1.0),
            rng.uniform(-3.0, 1.0),
            tail * rng.uniform(0.5, 1.5),
        ]))
    return points[:max(starts, 1)]


def _minimize_from(x0: np.ndarray, u: np.ndarray, y: np.ndarray):
    """Nelder-Mead, restarted from its own optimum until it stops improving"""
    result = minimize(_objective, x0, args=(u, y), method='Nelder-Mead',
                      options={'xatol': XATOL, 'fatol': FATOL, 'maxiter': MAXITER, 'adaptive': True})
    iterations = int(result.nit)
    settled = False
    for _ in range(MAX_RESTARTS):
        again = minimize(_objective, result.x, args=(u, y), method='Nelder-Mead',
                         options={'xatol': XATOL, 'fatol': FATOL, 'maxiter': MAXITER, 'adaptive': True})
        iterations += int(again.nit)
        improvement = result.fun - again.fun
        if again.fun <= result.fun:
            result = again
        if improvement <= FATOL * (1.0 + abs(result.fun)):
            settled = True
            break
    return result, iterations, settled and bool(result.success)


def fit_schedule(trace: RateTrace, starts: int = DEFAULT_STARTS, seed: int = 0) -> FitResult:
    """
    Least-squares fit of the schedule family to a trace

    Args:
        trace: At least 8 samples, not all at the same time
        starts: Number of Nelder-Mead starts (constant fit and two shaped
            guesses first, seeded random ones after)
        seed: Seed for the random starts

    Returns:
        FitResult with the best curve over all starts; its SSE never exceeds
        that of the best constant

    Raises:
        ScheduleFitError: If the trace has too few samples or a single time value
    """
    if len(trace) < MIN_SAMPLES:
        raise ScheduleFitError(
            f"Layer {trace.layer_id}: need at least {MIN_SAMPLES} samples to fit, got {len(trace)}"
        )
    t, rates = trace.times, trace.rates
    if np.ptp(t) == 0:
        raise ScheduleFitError(f"Layer {trace.layer_id}: all samples share t={t[0]}")

    rate_scale = float(np.max(np.abs(rates))) or 1.0
    time_scale = float(np.max(t))
    u = t / time_scale
    y = rates / rate_scale

    best = None
    iterations = 0
    for index, x0 in enumerate(_starting_points(y, starts, seed)):
        result, used, settled = _minimize_from(x0, u, y)
        iterations += used
        if best is None or result.fun < best[0].fun:
            best = (result, settled, index)

    result, converged, index = best
    constant_sse = float(np.sum((y - np.mean(y)) ** 2))
    theta = result.x
    if result.fun > constant_sse:
        theta = np.array([0.0, 0.0, 0.0, float(np.mean(y))])

    a, b, c, d = (float(v) for v in theta)
    params = ScheduleParams(
        a=a * rate_scale,
        b=b / np.cbrt(time_scale),
        c=c / time_scale,
        d=d * rate_scale,
    )
    predicted = params.evaluate(t)
    sse = float(np.sum((rates - predicted) ** 2))

    try:
        params.validate(float(np.max(t)))
    except ScheduleError as e:
        logger.warning(f"Layer {trace.layer_id}: fitted schedule leaves the positive range: {e}")
        converged = False

    logger.info(
        f"Layer {trace.layer_id}: schedule fit sse={sse:.3e} from start {index}, "
        f"{iterations} iterations, converged={converged}"
    )
    return FitResult(layer_id=trace.layer_id, params=params, sse=sse,
                     converged=converged, iterations=iterations)


def fit_traces(traces: List[RateTrace], starts: int = DEFAULT_STARTS, seed: int = 0,
               require_convergence: bool = True) -> List[FitResult]:
    """
    Fits every layer trace

    Raises:
        ScheduleFitError: If a fit fails or, when required, did not converge;
            the exception carries the fits produced so far
    """
    fits = []
    for trace in traces:
        try:
            fits.append(fit_schedule(trace, starts=starts, seed=seed))
        except ScheduleFitError as e:
            raise ScheduleFitError(str(e), fits=fits)
    failed = [fit.layer_id for fit in fits if not fit.converged]
    if require_convergence and failed:
        raise ScheduleFitError(f"Schedule fit did not converge for layer(s) {failed}", fits=fits)
    return fits


def best_constant_sse(trace: RateTrace) -> Optional[float]:
    rates = trace.rates
    if rates.size == 0:
        return None
    return float(np.sum((rates - np.mean(rates)) ** 2))
