"""Scoring: maps spike-triggered prediction grids onto next-event
probabilities comparable to the VMM outputs, applies the scenario-specific
scoring rules, bins error traces, and counts false positives.

The next-event probability for channel c between consecutive scored events
is the sum of the per-step estimates for c over (t_prev, t_event],
normalized by the same sum over all channels (zero if nothing was
predicted at all). Scenario rules adjust which events are scored, which
cells are masked, and how the summation window is padded/shifted (jitter).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .events import (
    Event,
    EventStream,
    LABEL_DROPPED,
    LABEL_INTERFERENCE,
    LABEL_NOISE,
    LABEL_SIGNAL,
)
from .runner import EpstRunResult, VmmRunResult

DEFAULT_BIN_WIDTH = 250
TRUE_EVENT_LABELS = (LABEL_SIGNAL, LABEL_INTERFERENCE, LABEL_DROPPED)

Cell = Tuple[int, int]  # (channel, time step)


@dataclass
class ErrorTrace:
    """Binned mean absolute probability error: (bin start, mean, samples)."""

    bin_width: int
    bins: List[Tuple[int, float, int]]

    def mean_over(self, t_lo: int, t_hi: int) -> float:
        """Sample-weighted mean error of all bins overlapping [t_lo, t_hi)."""
        total = 0.0
        count = 0
        for start, mean, n in self.bins:
            if start + self.bin_width <= t_lo or start >= t_hi:
                continue
            total += mean * n
            count += n
        return total / count if count else 0.0

    def to_csv(self) -> str:
        lines = ["bin_start,mean_error,samples"]
        for start, mean, n in self.bins:
            lines.append(f"{start},{mean:.12g},{n}")
        return "\n".join(lines) + "\n"


def bin_errors(
    samples: Iterable[Tuple[int, float]], bin_width: int, span: int
) -> ErrorTrace:
    sums: Dict[int, float] = {}
    counts: Dict[int, int] = {}
    for t, err in samples:
        b = (t // bin_width) * bin_width
        sums[b] = sums.get(b, 0.0) + err
        counts[b] = counts.get(b, 0) + 1
    bins = []
    for start in range(0, span + 1, bin_width):
        n = counts.get(start, 0)
        bins.append((start, sums.get(start, 0.0) / n if n else 0.0, n))
    return ErrorTrace(bin_width, bins)


def next_event_probability(
    estimate,  # callable (channel, step, before_time) -> float
    num_channels: int,
    channel: int,
    t_lo: int,
    t_hi: int,
    before_time: float,
    masks: Set[Cell] = frozenset(),
    allowed: Optional[Set[Cell]] = None,
) -> float:
    """Normalized marginal over steps in (t_lo, t_hi]. Masked cells are
    zeroed before summation; when `allowed` is given, only those cells
    enter the sums (the set of cells known to hold true events, so that
    spurious predictions at impossible cells do not hinder the ratio).
    Returns 0 when nothing was predicted anywhere."""
    num = 0.0
    den = 0.0
    for step in range(t_lo + 1, t_hi + 1):
        for c in range(num_channels):
            if (c, step) in masks:
                continue
            if allowed is not None and (c, step) not in allowed:
                continue
            v = estimate(c, step, before_time)
            if v:
                den += v
                if c == channel:
                    num += v
    return num / den if den > 0.0 else 0.0


def _score_stream(
    run: EpstRunResult,
    num_channels: int,
    scored: Sequence[Event],
    masks: Set[Cell] = frozenset(),
    allowed: Optional[Set[Cell]] = None,
    pad: int = 0,
    t_prev_init: Optional[int] = None,
) -> List[Tuple[int, float]]:
    """Per-event |1 - p| for a sequence of scored events. With pad > 0 the
    summation window is shifted to (t_prev + pad, t_event + pad], which
    both covers jittered predictions and excludes cells consumed by the
    previous event."""
    errors = []
    t_prev = t_prev_init
    for e in scored:
        if t_prev is not None and t_prev < e.time:
            p = next_event_probability(
                run.latest_estimate,
                num_channels,
                e.channel,
                t_prev + pad,
                e.time + pad,
                e.time,
                masks,
                allowed,
            )
            errors.append((e.time, abs(1.0 - p)))
        t_prev = e.time
    return errors


def score_structured(
    run: EpstRunResult, stream: EventStream, bin_width: int = DEFAULT_BIN_WIDTH
) -> Dict[str, ErrorTrace]:
    """Two interleaved scorings: the signal stream with interference cells
    zeroed, and each interference burst with signal cells zeroed. Returns
    per-stream traces plus their combination."""
    span = stream.events[-1].time if stream.events else 0
    signal = [e for e in stream.events if e.label == LABEL_SIGNAL]
    interference = [e for e in stream.events if e.label == LABEL_INTERFERENCE]
    signal_cells = {(e.channel, e.time) for e in signal}
    interference_cells = {(e.channel, e.time) for e in interference}

    sig_errors = _score_stream(run, stream.num_channels, signal, interference_cells)

    int_errors: List[Tuple[int, float]] = []
    burst: List[Event] = []
    for e in interference:
        if burst and e.time - burst[-1].time > 100:
            int_errors.extend(
                _score_stream(run, stream.num_channels, burst, signal_cells,
                              t_prev_init=burst[0].time)
            )
            burst = []
        burst.append(e)
    if burst:
        int_errors.extend(
            _score_stream(run, stream.num_channels, burst, signal_cells,
                          t_prev_init=burst[0].time)
        )

    return {
        "signal": bin_errors(sig_errors, bin_width, span),
        "interference": bin_errors(int_errors, bin_width, span),
        "combined": bin_errors(sig_errors + int_errors, bin_width, span),
    }


def score_random_noise(
    run: EpstRunResult, stream: EventStream, bin_width: int = DEFAULT_BIN_WIDTH
) -> ErrorTrace:
    """Noise events are skipped entirely; only signal events are scored and
    advance t_prev. Since the noise is unpredictable by construction, only
    signal cells can legitimately hold predictions, so the normalizing sum
    is restricted to them."""
    span = stream.events[-1].time if stream.events else 0
    signal = [e for e in stream.events if e.label == LABEL_SIGNAL]
    allowed = {(e.channel, e.time) for e in signal}
    return bin_errors(
        _score_stream(run, stream.num_channels, signal, allowed=allowed),
        bin_width,
        span,
    )


def _score_padded(
    run: EpstRunResult,
    num_channels: int,
    scored: Sequence[Event],
    pad: int,
) -> List[Tuple[int, float]]:
    """Jitter-aware scoring: the summation window (t_prev + pad,
    t_event + pad] covers the jitter distribution around the true time and
    excludes cells consumed by the previous event; only the scored event's
    own cells (its channel within +-pad of its true time) can legitimately
    hold this window's prediction, so the normalizing sum is restricted to
    them."""
    errors = []
    t_prev = None
    for e in scored:
        if t_prev is not None and t_prev < e.time:
            allowed = {(e.channel, e.time + dt) for dt in range(-pad, pad + 1)}
            p = next_event_probability(
                run.latest_estimate,
                num_channels,
                e.channel,
                t_prev + pad,
                e.time + pad,
                e.time,
                allowed=allowed,
            )
            errors.append((e.time, abs(1.0 - p)))
        t_prev = e.time
    return errors


def score_dropout(
    run: EpstRunResult, stream: EventStream, bin_width: int = DEFAULT_BIN_WIDTH, pad: int = 0
) -> ErrorTrace:
    """Dropped events are scored as true next events (predicting them is
    rewarded) and advance t_prev."""
    span = stream.events[-1].time if stream.events else 0
    scored = [e for e in stream.events if e.label in (LABEL_SIGNAL, LABEL_DROPPED)]
    return bin_errors(
        _score_padded(run, stream.num_channels, scored, pad), bin_width, span
    )


def score_jitter(
    run: EpstRunResult, stream: EventStream, pad: int = 4, bin_width: int = DEFAULT_BIN_WIDTH
) -> ErrorTrace:
    span = stream.events[-1].time if stream.events else 0
    signal = [e for e in stream.events if e.label == LABEL_SIGNAL]
    return bin_errors(
        _score_padded(run, stream.num_channels, signal, pad), bin_width, span
    )


def score_epst(
    run: EpstRunResult, stream: EventStream, mode: str,
    bin_width: int = DEFAULT_BIN_WIDTH, pad: int = 0,
) -> ErrorTrace:
    if mode == "structured":
        return score_structured(run, stream, bin_width)["combined"]
    if mode == "random_noise":
        return score_random_noise(run, stream, bin_width)
    if mode == "jitter":
        return score_jitter(run, stream, pad, bin_width)
    if mode == "jitter_dropout":
        return score_dropout(run, stream, bin_width, pad)
    raise ValueError(f"unknown scoring mode {mode!r}")


def score_vmm(
    run: VmmRunResult, mode: str, bin_width: int = DEFAULT_BIN_WIDTH
) -> ErrorTrace:
    """Per-event |1 - p| for the VMM baselines; a no-estimate counts as
    maximum error. The scenario rule picks which events are scored."""
    if mode == "structured":
        labels = (LABEL_SIGNAL, LABEL_INTERFERENCE)
    elif mode == "random_noise":
        labels = (LABEL_SIGNAL,)
    elif mode == "jitter":
        labels = (LABEL_SIGNAL,)
    elif mode == "jitter_dropout":
        labels = (LABEL_SIGNAL, LABEL_DROPPED)
    else:
        raise ValueError(f"unknown scoring mode {mode!r}")
    span = run.events[-1].time if run.events else 0
    samples = []
    for e, p in zip(run.events, run.probabilities):
        if e.label not in labels:
            continue
        err = 1.0 if p is None else abs(1.0 - p)
        samples.append((e.time, err))
    return bin_errors(samples, bin_width, span)


def aggregate_runs(traces: Sequence[ErrorTrace]) -> ErrorTrace:
    """Per-bin sample-weighted mean over seeds; traces must share binning."""
    if not traces:
        raise ValueError("need at least one trace")
    widths = {t.bin_width for t in traces}
    starts = {tuple(b[0] for b in t.bins) for t in traces}
    if len(widths) != 1 or len(starts) > 1:
        # allow differing spans: align on bin starts union
        if len(widths) != 1:
            raise ValueError("traces disagree on bin width")
    width = widths.pop()
    sums: Dict[int, float] = {}
    counts: Dict[int, int] = {}
    max_start = 0
    for trace in traces:
        for start, mean, n in trace.bins:
            sums[start] = sums.get(start, 0.0) + mean * n
            counts[start] = counts.get(start, 0) + n
            max_start = max(max_start, start)
    bins = []
    for start in range(0, max_start + 1, width):
        n = counts.get(start, 0)
        bins.append((start, sums.get(start, 0.0) / n if n else 0.0, n))
    return ErrorTrace(width, bins)


def count_false_positives(
    run: EpstRunResult,
    stream: EventStream,
    threshold: float = 0.5,
    bin_width: int = DEFAULT_BIN_WIDTH,
) -> List[Tuple[int, int]]:
    """Binned counts of confidently predicted cells with no true
    (signal/interference/dropped) event."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    true_cells = {
        (e.channel, e.time) for e in stream.events if e.label in TRUE_EVENT_LABELS
    }
    span = stream.events[-1].time if stream.events else 0
    counts: Dict[int, int] = {}
    for start in range(0, span + 1, bin_width):
        counts[start] = 0
    for step in range(span + 1):
        for c in range(stream.num_channels):
            if (c, step) in true_cells:
                continue
            if run.latest_estimate(c, step, step + 0.5) >= threshold:
                counts[(step // bin_width) * bin_width] += 1
    return sorted(counts.items())


def false_positive_csv(counts: Sequence[Tuple[int, int]], algorithm: str) -> str:
    lines = ["bin_start,count,algorithm"]
    for start, n in counts:
        lines.append(f"{start},{n},{algorithm}")
    return "\n".join(lines) + "\n"
