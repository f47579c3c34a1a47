"""
Rate Trace Service

Keeps the mean per-synapse learning rate of one weight layer over training
time (fractional epochs), as observed from the rate matrices a DLR step
returns. Recording never touches optimizer state or weights.
"""

from dataclasses import dataclass, replace
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..exceptions import NonIncreasingTimeError, TraceError, TraceFormatError

TRACE_HEADER = ('layer_id', 't_epochs', 'mean_rate')


@dataclass(frozen=True)
class RateTrace:
    layer_id: int
    samples: Tuple[Tuple[float, float], ...] = ()

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples], dtype=np.float64)

    @property
    def rates(self) -> np.ndarray:
        return np.array([rate for _, rate in self.samples], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.samples)


def record(trace: RateTrace, t: float, rates: np.ndarray) -> RateTrace:
    """
    Appends (t, mean of the layer's rate matrix)

    Raises:
        NonIncreasingTimeError: If t is not after the last recorded time
        TraceError: If the mean rate is not positive
    """
    if trace.samples and t <= trace.samples[-1][0]:
        raise NonIncreasingTimeError(
            f"Layer {trace.layer_id}: t={t} does not follow last sample t={trace.samples[-1][0]}"
        )
    mean_rate = float(np.mean(rates))
    if not mean_rate > 0:
        raise TraceError(f"Layer {trace.layer_id}: mean rate must be positive, got {mean_rate}")
    return replace(trace, samples=trace.samples + ((float(t), mean_rate),))


def export_trace(trace: RateTrace, include_header: bool = True) -> List[List[str]]:
    """CSV rows (layer_id, t_epochs, mean_rate); floats written with repr so they reload exactly"""
    rows = [list(TRACE_HEADER)] if include_header else []
    rows.extend([str(trace.layer_id), repr(t), repr(rate)] for t, rate in trace.samples)
    return rows


def import_trace_rows(rows: Iterable[Sequence[str]]) -> List[RateTrace]:
    """
    Parses rows produced by export_trace, one RateTrace per layer_id

    Raises:
        TraceFormatError: On a malformed row
    """
    by_layer = {}
    for line, row in enumerate(rows, start=1):
        if tuple(row) == TRACE_HEADER:
            continue
        try:
            layer_id, t, rate = int(row[0]), float(row[1]), float(row[2])
        except (IndexError, ValueError):
            raise TraceFormatError(f"Malformed trace row {line}: {row!r}")
        by_layer.setdefault(layer_id, []).append((t, rate))

    traces = []
    for layer_id in sorted(by_layer):
        trace = RateTrace(layer_id=layer_id)
        for t, rate in by_layer[layer_id]:
            if trace.samples and t <= trace.samples[-1][0]:
                raise NonIncreasingTimeError(f"Layer {layer_id}: times must increase, got {t}")
            trace = replace(trace, samples=trace.samples + ((t, rate),))
        traces.append(trace)
    return traces


def average_traces(traces: Sequence[RateTrace]) -> RateTrace:
    """
    Pointwise mean across runs of one layer's traces, over the checkpoints
    every run reached

    Raises:
        TraceError: If no traces are given, layers differ, or checkpoint times disagree
    """
    if not traces:
        raise TraceError("Cannot average an empty list of traces")
    layer_ids = {trace.layer_id for trace in traces}
    if len(layer_ids) != 1:
        raise TraceError(f"Cannot average traces of different layers: {sorted(layer_ids)}")

    length = min(len(trace) for trace in traces)
    times = traces[0].times[:length]
    for trace in traces[1:]:
        if not np.array_equal(trace.times[:length], times):
            raise TraceError("Traces were recorded on different checkpoint grids")

    mean = np.mean([trace.rates[:length] for trace in traces], axis=0) if length else np.array([])
    samples = tuple((float(t), float(rate)) for t, rate in zip(times, mean))
    return RateTrace(layer_id=traces[0].layer_id, samples=samples)
