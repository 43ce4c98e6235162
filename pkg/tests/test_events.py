"""Event model tests: windows, subsequence enumeration, and tolerance
matching, each checked against small independent oracles."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from epst.events import (
    Event,
    EventStream,
    HistoryWindow,
    Subsequence,
    canonical_items,
    enumerate_subsequences,
    read_stream,
    subsequence_matches,
    window_of,
    write_stream,
)


def make_stream(pairs, num_channels=8):
    return EventStream(tuple(Event(t, c) for t, c in pairs), num_channels)


# ---------------------------------------------------------------------------
# windows


def window_oracle(stream, t, m):
    """Brute force: every event with t - m <= time < t, as (delay, channel)."""
    out = set()
    for e in stream.events:
        if t - m <= e.time < t and e.label != "dropped":
            out.add((t - e.time, e.channel))
    return out


def test_window_is_half_open():
    stream = make_stream([(0, 1), (5, 2), (10, 3), (15, 4)])
    w = window_of(stream, 10, 10)
    # the event at t itself is excluded, the one at t - m included
    assert w.entries == {(10, 1), (5, 2)}


def test_window_excludes_dropped():
    stream = EventStream(
        (Event(2, 1), Event(5, 2, "dropped"), Event(8, 3)), 8
    )
    assert window_of(stream, 10, 10).entries == {(8, 1), (2, 3)}


@given(
    st.lists(
        st.tuples(st.integers(0, 60), st.integers(0, 4)), min_size=0, max_size=20
    ),
    st.integers(0, 70),
    st.integers(1, 40),
)
def test_window_matches_oracle(pairs, t, m):
    pairs.sort()
    stream = make_stream(pairs, 5)
    assert window_of(stream, t, m).entries == window_oracle(stream, t, m)


@given(
    st.lists(
        st.tuples(st.integers(0, 60), st.integers(0, 4)), min_size=0, max_size=15
    ),
    st.integers(10, 70),
    st.integers(0, 100),
)
def test_window_time_shift_invariance(pairs, t, delta):
    pairs.sort()
    stream = make_stream(pairs, 5)
    assert window_of(stream, t, 10).entries == window_of(stream.shifted(delta), t + delta, 10).entries


# ---------------------------------------------------------------------------
# subsequence enumeration


def enumerate_oracle(entries, min_len, max_len, max_gap):
    """Independent enumeration: filter the full power set."""
    out = set()
    for k in range(min_len, max_len + 1):
        for combo in itertools.combinations(sorted(entries), k):
            gaps_ok = all(
                b[0] - a[0] <= max_gap for a, b in zip(combo, combo[1:])
            )
            if gaps_ok:
                out.add(combo)
    return out


def test_enumerate_small_window_exact():
    w = HistoryWindow(frozenset({(3, 0), (5, 1), (9, 0)}), 16)
    subs = enumerate_subsequences(w, 1, 3, 16)
    got = {s.items for s in subs}
    assert got == enumerate_oracle(w.entries, 1, 3, 16)
    assert len(got) == 7  # 3 singles + 3 pairs + 1 triple


def test_enumerate_gap_filter():
    w = HistoryWindow(frozenset({(1, 0), (10, 1)}), 16)
    subs = enumerate_subsequences(w, 2, 2, 5)
    assert subs == []  # the only pair spans a gap of 9 > 5


def test_enumerate_canonical_order():
    w = HistoryWindow(frozenset({(2, 1), (2, 0), (4, 1)}), 8)
    subs = enumerate_subsequences(w, 1, 2, 8)
    keys = [s.sort_key() for s in subs]
    assert keys == sorted(keys)


@given(
    st.sets(st.tuples(st.integers(1, 12), st.integers(0, 3)), max_size=7),
    st.integers(1, 3),
    st.integers(1, 4),
    st.integers(1, 12),
)
def test_enumerate_matches_oracle(entries, min_len, extra, max_gap):
    max_len = min_len + extra - 1
    w = HistoryWindow(frozenset(entries), 12)
    got = {s.items for s in enumerate_subsequences(w, min_len, max_len, max_gap)}
    assert got == enumerate_oracle(entries, min_len, max_len, max_gap)


# ---------------------------------------------------------------------------
# tolerance matching


def match_oracle(items, entries, tol):
    """Injective assignment via explicit permutation search."""
    entries = list(entries)
    if len(items) > len(entries):
        return False
    for perm in itertools.permutations(range(len(entries)), len(items)):
        ok = all(
            entries[j][1] == items[i][1]
            and abs(entries[j][0] - items[i][0]) <= tol
            for i, j in enumerate(perm)
        )
        if ok:
            return True
    return False


def test_match_exact_subset():
    w = HistoryWindow(frozenset({(3, 0), (7, 1), (11, 2)}), 16)
    assert subsequence_matches(Subsequence(((3, 0), (11, 2))), w, 0)
    assert not subsequence_matches(Subsequence(((4, 0),)), w, 0)
    assert subsequence_matches(Subsequence(((4, 0),)), w, 1)


def test_match_requires_injectivity():
    # one window event cannot satisfy two items even when both are in range
    w = HistoryWindow(frozenset({(5, 0)}), 16)
    assert not subsequence_matches(Subsequence(((4, 0), (6, 0))), w, 2)
    w2 = HistoryWindow(frozenset({(4, 0), (6, 0)}), 16)
    assert subsequence_matches(Subsequence(((4, 0), (6, 0))), w2, 2)


def test_match_backtracking_case():
    # greedy assignment of (5,0) to the window event at 5 would strand (6,0);
    # the matcher must backtrack to 5->(6,...) no: items (5,0),(6,0) against
    # entries (6,0),(7,0) with tol 1 requires the crossed assignment
    w = HistoryWindow(frozenset({(6, 0), (7, 0)}), 16)
    assert subsequence_matches(Subsequence(((5, 0), (6, 0))), w, 1)


@given(
    st.sets(st.tuples(st.integers(1, 10), st.integers(0, 2)), max_size=6),
    st.lists(st.tuples(st.integers(1, 10), st.integers(0, 2)), min_size=1, max_size=4),
    st.integers(0, 3),
)
@settings(max_examples=200)
def test_match_agrees_with_permutation_oracle(entries, raw_items, tol):
    items = canonical_items(set(raw_items))
    sub = Subsequence(items)
    w = HistoryWindow(frozenset(entries), 10)
    assert subsequence_matches(sub, w, tol) == match_oracle(items, entries, tol)


def test_subsequence_rejects_non_canonical():
    with pytest.raises(ValueError):
        Subsequence(((5, 1), (3, 0)))
    with pytest.raises(ValueError):
        Subsequence(())


# ---------------------------------------------------------------------------
# stream files


def test_stream_round_trip(tmp_path):
    stream = EventStream(
        (Event(1, 0), Event(4, 2, "noise"), Event(9, 1, "dropped")), 4
    )
    path = tmp_path / "events.csv"
    write_stream(path, stream)
    back = read_stream(path, 4)
    assert back == stream


def test_stream_reader_defaults_and_comments(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("# header\n3,1\n\n7,0,noise\n")
    stream = read_stream(path, 2)
    assert stream.events == (Event(3, 1), Event(7, 0, "noise"))


def test_stream_rejects_unsorted():
    with pytest.raises(ValueError):
        EventStream((Event(5, 0), Event(3, 1)), 2)
