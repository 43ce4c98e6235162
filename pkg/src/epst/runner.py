"""Online experiment drive: feed a labeled event stream to an EPST variant
or a VMM baseline, event by event, collecting the spike-triggered
prediction matrices (EPST) or per-event next-symbol probabilities (VMM)
for later scoring. Learning for one event always happens before the
prediction triggered by the next event.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .events import Event, EventStream, HistoryWindow, LABEL_DROPPED
from .extensions import (
    FALSE_POSITIVE_THRESHOLD,
    Variant,
    VARIANTS,
    inhibitory_maintenance,
    prune_entropy,
    record_false_positive,
)
from .infer import PredictionMatrix, predict_from_context, sampled_predict
from .tree import EpstParams, EpstTree
from .vmm import VmmModel, symbolize

PRUNE_INTERVAL_EVENTS = 500


@dataclass
class SamplingConfig:
    sample_size: int
    repeats: int
    seed: int = 0


@dataclass
class EpstRunResult:
    trigger_times: List[int]
    matrices: List[PredictionMatrix]
    trees: List[EpstTree]
    params: EpstParams
    variant: Variant

    def latest_estimate(self, channel: int, step_time: int, before_time: float) -> float:
        """Estimate for the cell (channel, step_time) from the most recent
        trigger strictly before `before_time` that covers the step."""
        idx = bisect.bisect_right(self.trigger_times, step_time) - 1
        while idx >= 0 and self.trigger_times[idx] >= before_time:
            idx -= 1
        if idx < 0:
            return 0.0
        n = step_time - self.trigger_times[idx]
        if n > self.matrices[idx].steps:
            return 0.0
        return self.matrices[idx].probability(channel, n)


@dataclass
class VmmRunResult:
    """Per-event probability the model assigned to the event's channel just
    before (possibly) consuming it; None marks the PST no-estimate case."""

    events: Tuple[Event, ...]
    probabilities: List[Optional[float]]


def run_epst(
    stream: EventStream,
    params: EpstParams,
    variant: Variant = VARIANTS["epst"],
    sampling: Optional[SamplingConfig] = None,
    fp_threshold: float = FALSE_POSITIVE_THRESHOLD,
) -> EpstRunResult:
    C = stream.num_channels
    trees = [EpstTree(g, params) for g in range(C)]
    visible = [e for e in stream.events if e.label != LABEL_DROPPED]
    vis_times = [e.time for e in visible]
    vis_cells = {(e.channel, e.time) for e in visible}

    result = EpstRunResult([], [], trees, params, variant)

    def window_at(t: int) -> HistoryWindow:
        lo = bisect.bisect_left(vis_times, t - params.history_window)
        hi = bisect.bisect_left(vis_times, t)
        entries = {(t - e.time, e.channel) for e in visible[lo:hi]}
        return HistoryWindow(frozenset(entries), params.history_window)

    def context_at(t: int) -> List[Tuple[int, int]]:
        lo = bisect.bisect_left(vis_times, t - params.history_window)
        hi = bisect.bisect_right(vis_times, t)
        return [(e.time, e.channel) for e in visible[lo:hi]]

    def resolve_false_positives(step_lo: int, step_hi: int, present: frozenset):
        """Check every step in [step_lo, step_hi] for confident predictions
        of channels with no event there, and teach inhibitory patterns."""
        for step in range(step_lo, step_hi + 1):
            window = None
            for tree in trees:
                if tree.g in present and step == step_hi:
                    continue
                p = result.latest_estimate(tree.g, step, float("inf"))
                if p < fp_threshold:
                    continue
                if (tree.g, step) in vis_cells:
                    continue
                if window is None:
                    window = window_at(step)
                record_false_positive(tree, window)

    # iterate events grouped by time
    groups: List[Tuple[int, List[Event]]] = []
    for e in visible:
        if groups and groups[-1][0] == e.time:
            groups[-1][1].append(e)
        else:
            groups.append((e.time, [e]))

    received = 0
    next_prune = PRUNE_INTERVAL_EVENTS
    last_resolved = -1
    for t, evs in groups:
        channels_now = frozenset(e.channel for e in evs)
        if variant.inhibition:
            resolve_false_positives(last_resolved + 1, t, channels_now)
            # matched inhibitory patterns coinciding with actual spikes
            for e in evs:
                idx = bisect.bisect_left(result.trigger_times, t) - 1
                if idx < 0:
                    continue
                n = t - result.trigger_times[idx]
                matrix = result.matrices[idx]
                if n > matrix.steps:
                    continue
                hits = [
                    node
                    for node, mask in matrix.inhibitory_hits.get(e.channel, ())
                    if mask >> n & 1
                ]
                if hits:
                    inhibitory_maintenance(trees[e.channel], True, hits)
        last_resolved = t

        window = window_at(t)
        for e in evs:
            for tree in trees:
                tree.step1_denominators(e, window)
        for e in sorted(evs, key=lambda e: e.channel):
            trees[e.channel].step2_numerators_and_extend(window)
        for tree in trees:
            tree.observe_time(t)
        received += len(evs)

        if variant.pruning:
            while received >= next_prune:
                for tree in trees:
                    prune_entropy(tree, 0.0)
                next_prune += PRUNE_INTERVAL_EVENTS

        if sampling is None:
            matrix = predict_from_context(trees, context_at(t), t)
        else:
            matrix = sampled_predict(
                trees,
                stream,
                t,
                sampling.sample_size,
                sampling.repeats,
                sampling.seed + t,
            )
        result.trigger_times.append(t)
        result.matrices.append(matrix)

    return result


def run_vmm(stream: EventStream, kind: str, max_order: int = 8, min_frequency: int = 3) -> VmmRunResult:
    model = VmmModel(kind, stream.num_channels, max_order, min_frequency)
    ordered = sorted(stream.events, key=lambda e: (e.time, e.channel))
    probs: List[Optional[float]] = []
    for e in ordered:
        dist = model.predict()
        probs.append(None if dist is None else float(dist[e.channel]))
        if e.label != LABEL_DROPPED:
            model.update(e.channel)
    return VmmRunResult(tuple(ordered), probs)
