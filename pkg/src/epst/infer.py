"""Spike-triggered prediction.

A prediction at trigger time t fills a (channel, step) grid for steps
n = 0..M'. Each cell takes the probability of the representative
subsequence: among all stored patterns matching the history window at
t + n (built only from events at or before t), the one with the lowest
count-based entropy wins; matched inhibitory patterns contribute a
probability of exactly zero.

Matching for all steps of one trigger is done in a single tree walk:
an item (d, c) of a stored pattern matches an event with age a = t - t_k
at step n iff |n + a - d| <= tol, so each (item, event) pair contributes
a contiguous interval of steps, tracked as a bitmask during the walk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .events import Event, EventStream, Subsequence
from .tree import EpstTree, TreeNode


class UndefinedCandidateError(ValueError):
    """Raised for a zero denominator; the caller must skip the candidate."""


def estimate_probability(numerator: int, denominator: int) -> float:
    """Clamped count quotient n(s and g) / n(s)."""
    if denominator < 1:
        raise UndefinedCandidateError("denominator must be >= 1")
    return min(max(numerator, 0) / denominator, 1.0)


def entropy(numerator: int, denominator: int) -> float:
    """Binary Shannon entropy of the estimated probability (natural log,
    0*ln 0 := 0). Lower means more reliable."""
    p = estimate_probability(numerator, denominator)
    h = 0.0
    if 0.0 < p < 1.0:
        h = -(p * math.log(p) + (1.0 - p) * math.log(1.0 - p))
    return h


@dataclass(frozen=True)
class Candidate:
    subsequence: Subsequence
    numerator: int
    denominator: int
    probability: float
    entropy: float
    inhibitory: bool = False

    def rank_key(self):
        """Selection order: low entropy, then longer subsequence, then
        higher denominator, then canonical subsequence order."""
        return (
            self.entropy,
            -len(self.subsequence),
            -self.denominator,
            self.subsequence.sort_key(),
        )


def candidate_from_node(node: TreeNode) -> Candidate:
    if node.is_inhibitory:
        return Candidate(
            subsequence=node.subsequence(),
            numerator=0,
            denominator=1,
            probability=0.0,
            entropy=0.0,
            inhibitory=True,
        )
    return Candidate(
        subsequence=node.subsequence(),
        numerator=node.numerator,
        denominator=node.denominator,
        probability=estimate_probability(node.numerator, node.denominator),
        entropy=entropy(node.numerator, node.denominator),
    )


def select_representative(candidates: Iterable[Candidate]) -> Optional[Candidate]:
    best = None
    for cand in candidates:
        if best is None or cand.rank_key() < best.rank_key():
            best = cand
    return best


def early_stop_select(
    candidates: Iterable[Candidate], entropy_threshold: float
) -> Optional[Candidate]:
    """First candidate at or below the entropy threshold, else the full-scan
    representative."""
    best = None
    for cand in candidates:
        if cand.entropy <= entropy_threshold:
            return cand
        if best is None or cand.rank_key() < best.rank_key():
            best = cand
    return best


@dataclass
class PredictionMatrix:
    """Per-trigger grid of probability estimates, one row per predicted
    channel, columns n = 0..M'. `chosen` records the representative behind
    every nonzero cell."""

    trigger_time: int
    steps: int  # M'
    estimates: Dict[int, List[float]] = field(default_factory=dict)
    chosen: Dict[Tuple[int, int], Candidate] = field(default_factory=dict)
    # matched inhibitory patterns per channel: (node, step bitmask)
    inhibitory_hits: Dict[int, List[Tuple[TreeNode, int]]] = field(default_factory=dict)

    def probability(self, channel: int, n: int) -> float:
        row = self.estimates.get(channel)
        if row is None:
            return 0.0
        return row[n]

    def to_csv(self) -> str:
        lines = ["channel,n,probability"]
        for channel in sorted(self.estimates):
            row = self.estimates[channel]
            for n, p in enumerate(row):
                lines.append(f"{channel},{n},{p:.12g}")
        return "\n".join(lines) + "\n"


def _step_masks(tree: EpstTree, events: Sequence[Tuple[int, int]], t: int):
    """Map every matching node to a bitmask of steps n where its full
    path-subsequence matches the window at t + n (events limited to <= t)."""
    p = tree.params
    m, mp, tol = p.history_window, p.prediction_window, p.matching_interval
    full_mask = (1 << (mp + 1)) - 1
    by_channel: Dict[int, List[Tuple[int, int]]] = {}
    for k, (time_k, c_k) in enumerate(events):
        by_channel.setdefault(c_k, []).append((t - time_k, k))

    results: Dict[TreeNode, int] = {}

    def walk(node: TreeNode, mask: int, used: set):
        for c, occurrences in by_channel.items():
            for child in node.by_channel.get(c, ()):
                d = child.item[0]
                for age, k in occurrences:
                    if k in used:
                        continue
                    lo = max(d - age - tol, 1 - age, 0)
                    hi = min(d - age + tol, m - age, mp)
                    if lo > hi:
                        continue
                    seg = mask & (((1 << (hi - lo + 1)) - 1) << lo)
                    if not seg:
                        continue
                    results[child] = results.get(child, 0) | seg
                    used.add(k)
                    walk(child, seg, used)
                    used.discard(k)

    walk(tree.root, full_mask, set())
    return results


def _predict_from_events(
    trees: Sequence[EpstTree], events: Sequence[Tuple[int, int]], t: int
) -> PredictionMatrix:
    steps = max(tree.params.prediction_window for tree in trees)
    matrix = PredictionMatrix(trigger_time=t, steps=steps)
    for tree in trees:
        p = tree.params
        mp = p.prediction_window
        row = [0.0] * (steps + 1)
        node_masks = _step_masks(tree, events, t)
        min_den = max(p.frequency_threshold, 1)
        scored: List[Tuple[Candidate, int]] = []
        inhib: List[Tuple[TreeNode, int]] = []
        for node, mask in node_masks.items():
            if node.is_inhibitory:
                inhib.append((node, mask))
                scored.append((candidate_from_node(node), mask))
                continue
            if node.depth < p.min_subseq_len or node.denominator < min_den:
                continue
            scored.append((candidate_from_node(node), mask))
        scored.sort(key=lambda cm: cm[0].rank_key())
        remaining = (1 << (mp + 1)) - 1
        for cand, mask in scored:
            take = mask & remaining
            while take:
                n = (take & -take).bit_length() - 1
                take &= take - 1
                row[n] = cand.probability
                if cand.probability > 0.0:
                    matrix.chosen[(tree.g, n)] = cand
            remaining &= ~mask
            if not remaining:
                break
        matrix.estimates[tree.g] = row
        if inhib:
            matrix.inhibitory_hits[tree.g] = inhib
    return matrix


def context_events(stream: EventStream, t: int, m: int) -> List[Tuple[int, int]]:
    """Visible events usable by a prediction triggered at t: times in
    [t - M, t], dropped events excluded."""
    return [
        (e.time, e.channel)
        for e in stream.events
        if t - m <= e.time <= t and e.label != "dropped"
    ]


def predict_window(trees: Sequence[EpstTree], stream: EventStream, t: int) -> PredictionMatrix:
    """Spike-triggered prediction at time t using only events at or before
    t. For each tree and each step n in 0..M', the window at t + n is
    matched against the stored patterns and the representative's
    probability is written to the cell (0 when nothing matches)."""
    m = max(tree.params.history_window for tree in trees)
    return _predict_from_events(trees, context_events(stream, t, m), t)


def predict_from_context(
    trees: Sequence[EpstTree], events: Sequence[Tuple[int, int]], t: int
) -> PredictionMatrix:
    """predict_window on an explicit (time, channel) context list."""
    return _predict_from_events(trees, events, t)


def sampled_predict(
    trees: Sequence[EpstTree],
    stream: EventStream,
    t: int,
    sample_size: int,
    repeats: int,
    seed: int,
) -> PredictionMatrix:
    """Run the prediction `repeats` times on contexts downsampled to
    min(sample_size, context size) events without replacement and keep the
    cell-wise maximum."""
    if sample_size < 1 or repeats < 1:
        raise ValueError("sample_size and repeats must be >= 1")
    m = max(tree.params.history_window for tree in trees)
    events = context_events(stream, t, m)
    rng = np.random.default_rng(seed)
    agg: Optional[PredictionMatrix] = None
    for _ in range(repeats):
        if sample_size >= len(events):
            subset = list(events)
        else:
            idx = rng.choice(len(events), size=sample_size, replace=False)
            subset = [events[i] for i in sorted(idx)]
        matrix = _predict_from_events(trees, subset, t)
        if agg is None:
            agg = matrix
            continue
        for g, row in matrix.estimates.items():
            arow = agg.estimates[g]
            for n, p in enumerate(row):
                if p > arow[n]:
                    arow[n] = p
                    agg.chosen[(g, n)] = matrix.chosen[(g, n)]
        for g, hits in matrix.inhibitory_hits.items():
            seen = agg.inhibitory_hits.setdefault(g, [])
            known = {id(node) for node, _ in seen}
            seen.extend(h for h in hits if id(h[0]) not in known)
    return agg
