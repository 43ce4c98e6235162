"""Per-channel prediction tree over event subsequences.

The virtual root stands for the predicted spike (delay 0). Level-1
children hold the most recent history events; deeper nodes extend
further into the past. A node's path from the root spells a stored
subsequence as a cumulative-delay item list.

Two spike-triggered learning steps maintain the per-node counts:
step 1 (any spike) accumulates denominators n(s); step 2 (spike in the
preferred channel) accumulates numerators n(s and g) and grows the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .events import Event, HistoryWindow, Item, Subsequence, canonical_items


@dataclass
class EpstParams:
    history_window: int = 32          # M
    prediction_window: int = 28       # M'
    min_subseq_len: int = 2
    max_subseq_len: int = 4
    max_spike_interval: int = 32
    branch_extension_threshold: int = 1
    frequency_threshold: int = 0
    matching_interval: int = 0        # tol

    def __post_init__(self):
        for name in (
            "history_window",
            "prediction_window",
            "min_subseq_len",
            "max_subseq_len",
            "max_spike_interval",
            "branch_extension_threshold",
            "frequency_threshold",
            "matching_interval",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.min_subseq_len > self.max_subseq_len:
            raise ValueError("min_subseq_len must be <= max_subseq_len")


@dataclass
class InhibitoryRecord:
    """Explicit inhibitory pattern bookkeeping: joint occurrences with g
    seen since creation, and the false negatives it caused."""

    joint_count: int = 0
    false_negative_count: int = 0


class TreeNode:
    __slots__ = (
        "item",
        "cum_delay",
        "depth",
        "numerator",
        "denominator",
        "children",
        "by_channel",
        "parent",
        "inhibitory",
    )

    def __init__(self, item: Optional[Item], parent: Optional["TreeNode"]):
        self.item = item                      # (cumulative delay, channel); None at root
        self.parent = parent
        self.cum_delay = 0 if item is None else item[0]
        self.depth = 0 if parent is None else parent.depth + 1
        self.numerator = 0
        self.denominator = 0
        self.children: Dict[Item, TreeNode] = {}
        # children grouped by channel; matching only ever needs the
        # children on a channel present in the window
        self.by_channel: Dict[int, List["TreeNode"]] = {}
        self.inhibitory: Optional[InhibitoryRecord] = None

    def attach(self, child: "TreeNode") -> None:
        self.children[child.item] = child
        self.by_channel.setdefault(child.item[1], []).append(child)

    def detach(self, item: Item) -> "TreeNode":
        child = self.children.pop(item)
        group = self.by_channel[item[1]]
        group.remove(child)
        if not group:
            del self.by_channel[item[1]]
        return child

    @property
    def is_inhibitory(self) -> bool:
        return self.inhibitory is not None

    def edge(self) -> Tuple[int, int]:
        """(delay to parent event, channel)."""
        parent_cum = self.parent.cum_delay if self.parent is not None else 0
        return (self.cum_delay - parent_cum, self.item[1])

    def subsequence(self) -> Subsequence:
        items = []
        node = self
        while node.item is not None:
            items.append(node.item)
            node = node.parent
        return Subsequence(canonical_items(items))


class EpstTree:
    """One prediction unit: learns to predict spikes in channel `g`."""

    def __init__(self, g: int, params: EpstParams):
        if g < 0:
            raise ValueError("preferred channel must be >= 0")
        self.g = g
        self.params = params
        self.root = TreeNode(None, None)
        self.root_count = 0          # n(g): spikes seen in the preferred channel
        self.elapsed_time = 0        # total simulation time observed
        self.node_count = 0

    # -- structure helpers -------------------------------------------------

    def _add_child(self, parent: TreeNode, item: Item) -> TreeNode:
        node = TreeNode(item, parent)
        parent.attach(node)
        self.node_count += 1
        return node

    def remove_node(self, node: TreeNode) -> None:
        """Remove a whole subtree."""
        if node.item is None:
            raise ValueError("cannot remove the virtual root")
        removed = _count_subtree(node)
        node.parent.detach(node.item)
        self.node_count -= removed

    def iter_nodes(self):
        """All non-root nodes, depth-first, children in canonical item order."""
        stack = [self.root.children[k] for k in sorted(self.root.children, reverse=True)]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children[k] for k in sorted(node.children, reverse=True))

    def observe_time(self, t: int) -> None:
        self.elapsed_time = max(self.elapsed_time, t)

    # -- learning ----------------------------------------------------------

    def step1_denominators(self, event: Event, window: HistoryWindow) -> None:
        """Triggered on any spike. In each top-level subtree whose root
        channel equals the event's channel, increment the denominator of
        every node whose subsequence relative to that root matches the
        window; the active root itself is incremented unconditionally."""
        tol = self.params.matching_interval
        entries = window.sorted_entries()
        for item, level1 in self.root.children.items():
            if item[1] != event.channel:
                continue
            if not level1.is_inhibitory:
                level1.denominator += 1
            matched = set()
            _match_below(level1, level1.cum_delay, entries, tol, set(), matched)
            for node in matched:
                if not node.is_inhibitory:
                    node.denominator += 1

    def step2_numerators_and_extend(self, window: HistoryWindow) -> None:
        """Triggered on a spike in channel g at the current time; `window`
        is the history window of that spike. Increments the root count and
        the numerator of every matching node, then extends branches below
        nodes whose numerator exceeds the branch extension threshold."""
        p = self.params
        self.root_count += 1
        entries = window.sorted_entries()
        matched = self.match_nodes_raw(window)
        for node in matched:
            if not node.is_inhibitory:
                node.numerator += 1

        grow = []
        # Window entries always enter as level-1 nodes; deeper growth is
        # gated by the extension threshold.
        for entry in entries:
            if entry[0] > p.max_spike_interval or p.max_subseq_len < 1:
                continue
            child = self.root.children.get(entry)
            if child is None:
                child = self._add_child(self.root, entry)
                child.numerator = 1
                child.denominator = 1
                grow.append(child)
        grow.extend(n for n in matched if not n.is_inhibitory)

        while grow:
            node = grow.pop()
            if node.numerator <= p.branch_extension_threshold:
                continue
            if node.depth >= p.max_subseq_len:
                continue
            for entry in entries:
                if entry <= node.item:
                    continue  # canonical order; each subset built once
                if entry[0] - node.cum_delay > p.max_spike_interval:
                    continue
                if entry in node.children:
                    continue
                child = self._add_child(node, entry)
                child.numerator = 1
                child.denominator = 1
                grow.append(child)

    # -- lookup ------------------------------------------------------------

    def match_nodes_raw(self, window: HistoryWindow) -> List[TreeNode]:
        """All nodes (any depth, no filtering) whose full path-subsequence
        matches the window under the matching interval."""
        entries = window.sorted_entries()
        matched = set()
        _match_below(self.root, 0, entries, self.params.matching_interval, set(), matched)
        return sorted(matched, key=lambda n: n.subsequence().sort_key())

    def matching_nodes(self, window: HistoryWindow) -> List[Tuple[TreeNode, Subsequence]]:
        """Excitatory nodes usable for prediction: path matches the window,
        length >= min_subseq_len, denominator >= frequency_threshold (and
        at least 1 so a probability is defined)."""
        p = self.params
        out = []
        for node in self.match_nodes_raw(window):
            if node.is_inhibitory:
                continue
            if node.depth < p.min_subseq_len:
                continue
            if node.denominator < max(p.frequency_threshold, 1):
                continue
            out.append((node, node.subsequence()))
        return out

    def matching_inhibitory(self, window: HistoryWindow) -> List[Tuple[TreeNode, Subsequence]]:
        return [
            (node, node.subsequence())
            for node in self.match_nodes_raw(window)
            if node.is_inhibitory
        ]

    # -- serialization -----------------------------------------------------

    def dump(self) -> str:
        """Deterministic depth-first text snapshot, one node per line:
        (delay,channel,numerator,denominator,inhibitory) with indentation."""
        lines = [f"tree g={self.g} root_count={self.root_count} nodes={self.node_count}"]

        def walk(node: TreeNode, indent: int):
            for key in sorted(node.children):
                child = node.children[key]
                d, c = child.edge()
                lines.append(
                    "  " * indent
                    + f"({d},{c},{child.numerator},{child.denominator},"
                    + ("1" if child.is_inhibitory else "0")
                    + ")"
                )
                walk(child, indent + 1)

        walk(self.root, 1)
        return "\n".join(lines) + "\n"


def new_tree(g: int, params: EpstParams) -> EpstTree:
    return EpstTree(g, params)


def _count_subtree(node: TreeNode) -> int:
    total = 1
    for child in node.children.values():
        total += _count_subtree(child)
    return total


def _match_below(node, base_delay, entries, tol, used, matched):
    """Mark every descendant of `node` whose path below `node` (delays taken
    relative to `base_delay`) has an injective window assignment."""
    for j, (wd, wc) in enumerate(entries):
        if j in used:
            continue
        for child in node.by_channel.get(wc, ()):
            if abs(wd - (child.cum_delay - base_delay)) > tol:
                continue
            matched.add(child)
            used.add(j)
            _match_below(child, base_delay, entries, tol, used, matched)
            used.discard(j)
