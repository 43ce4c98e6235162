"""Event model: timestamped multi-channel events, history windows, and
subsequence decomposition with the tolerance-based matching rule.

Time is discrete (one integer step). A history window at reference time t
holds (delay, channel) pairs for events in [t - M, t); the event at t
itself is excluded. Subsequences are ordered subsets of a window with
non-decreasing delays; two simultaneous items are ordered by channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, List, Sequence, Tuple

LABEL_SIGNAL = "signal"
LABEL_INTERFERENCE = "interference"
LABEL_NOISE = "noise"
LABEL_DROPPED = "dropped"

_LABELS = (LABEL_SIGNAL, LABEL_INTERFERENCE, LABEL_NOISE, LABEL_DROPPED)


@dataclass(frozen=True)
class Event:
    """One discrete event: (time, channel) plus a provenance label.

    Dropped events stay in the stream for scoring but are hidden from
    the algorithms.
    """

    time: int
    channel: int
    label: str = LABEL_SIGNAL

    def __post_init__(self):
        if self.time < 0:
            raise ValueError(f"event time must be >= 0, got {self.time}")
        if self.channel < 0:
            raise ValueError(f"channel must be >= 0, got {self.channel}")
        if self.label not in _LABELS:
            raise ValueError(f"unknown label {self.label!r}")


@dataclass(frozen=True)
class EventStream:
    """Time-sorted sequence of events over `num_channels` channels.

    Ties in time are legal (simultaneous events across channels).
    """

    events: Tuple[Event, ...]
    num_channels: int

    def __post_init__(self):
        evs = tuple(self.events)
        object.__setattr__(self, "events", evs)
        for a, b in zip(evs, evs[1:]):
            if b.time < a.time:
                raise ValueError("events must be sorted by non-decreasing time")
        for e in evs:
            if e.channel >= self.num_channels:
                raise ValueError(
                    f"channel {e.channel} out of range [0, {self.num_channels})"
                )

    def __len__(self):
        return len(self.events)

    def visible(self) -> Tuple[Event, ...]:
        """Events the algorithms are allowed to see (drops hidden)."""
        return tuple(e for e in self.events if e.label != LABEL_DROPPED)

    def shifted(self, delta: int) -> "EventStream":
        if delta < 0:
            raise ValueError("shift must be >= 0")
        return EventStream(
            tuple(Event(e.time + delta, e.channel, e.label) for e in self.events),
            self.num_channels,
        )


# A window entry and a subsequence item are both (delay, channel) pairs.
Item = Tuple[int, int]


def canonical_items(items: Iterable[Item]) -> Tuple[Item, ...]:
    """Sort items by (delay, channel): non-decreasing delay, channel asc on ties."""
    return tuple(sorted(items))


@dataclass(frozen=True)
class HistoryWindow:
    """Relative view of the recent past: a set of (delay, channel) pairs
    with 0 < delay <= window_length."""

    entries: frozenset
    window_length: int

    def __post_init__(self):
        entries = frozenset(self.entries)
        object.__setattr__(self, "entries", entries)
        for d, _c in entries:
            if not (0 < d <= self.window_length):
                raise ValueError(f"delay {d} outside (0, {self.window_length}]")

    def sorted_entries(self) -> Tuple[Item, ...]:
        return canonical_items(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class Subsequence:
    """Ordered subset of window entries, non-decreasing in delay."""

    items: Tuple[Item, ...]

    def __post_init__(self):
        items = tuple(self.items)
        object.__setattr__(self, "items", items)
        if not items:
            raise ValueError("subsequence must hold at least one item")
        if items != canonical_items(items):
            raise ValueError("items must be in canonical (delay, channel) order")

    def __len__(self):
        return len(self.items)

    def sort_key(self):
        """Canonical order: lexicographic on (delay list, channel list)."""
        return tuple(d for d, _ in self.items), tuple(c for _, c in self.items)


def window_of(stream: EventStream, t: int, m: int) -> HistoryWindow:
    """History window at reference time t: events with time in [t-M, t),
    dropped events excluded."""
    if t < 0:
        raise ValueError("reference time must be >= 0")
    entries = {
        (t - e.time, e.channel)
        for e in stream.events
        if t - m <= e.time < t and e.label != LABEL_DROPPED
    }
    return HistoryWindow(frozenset(entries), m)


def window_from_items(items: Iterable[Item], m: int) -> HistoryWindow:
    return HistoryWindow(frozenset(items), m)


def enumerate_subsequences(
    window: HistoryWindow, min_len: int, max_len: int, max_gap: int
) -> List[Subsequence]:
    """Every subset of the window with min_len <= size <= max_len where the
    gap between consecutive items (by delay) is <= max_gap.

    Returned in deterministic canonical order.
    """
    if not (1 <= min_len <= max_len):
        raise ValueError("need 1 <= min_len <= max_len")
    entries = window.sorted_entries()
    out = []
    for k in range(min_len, min(max_len, len(entries)) + 1):
        for combo in combinations(entries, k):
            if all(b[0] - a[0] <= max_gap for a, b in zip(combo, combo[1:])):
                out.append(Subsequence(combo))
    out.sort(key=Subsequence.sort_key)
    return out


def subsequence_matches(sub: Subsequence, window: HistoryWindow, tol: int) -> bool:
    """True iff window entries can be injectively assigned to the items of
    `sub`, same channel, delays within +-tol."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    entries = window.sorted_entries()
    return _assign(sub.items, 0, entries, set(), tol)


def _assign(items, idx, entries, used, tol):
    if idx == len(items):
        return True
    d, c = items[idx]
    for j, (wd, wc) in enumerate(entries):
        if j in used or wc != c or abs(wd - d) > tol:
            continue
        used.add(j)
        if _assign(items, idx + 1, entries, used, tol):
            used.discard(j)
            return True
        used.discard(j)
    return False


def read_stream(path, num_channels: int) -> EventStream:
    """Event stream file: one `time,channel[,label]` per line, UTF-8."""
    events = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) not in (2, 3):
                raise ValueError(f"bad stream line: {line!r}")
            label = parts[2].strip() if len(parts) == 3 else LABEL_SIGNAL
            events.append(Event(int(parts[0]), int(parts[1]), label))
    return EventStream(tuple(events), num_channels)


def write_stream(path, stream: EventStream) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in stream.events:
            fh.write(f"{e.time},{e.channel},{e.label}\n")
