"""Tree extensions: inhibitory (XOR) patterns and pruning.

Inhibitory patterns are created from false positives: subsequences of the
offending window that do not already exist as excitatory patterns are
stored with a zero probability contribution. They are destroyed when they
repeatedly coincide with actual spikes in the preferred channel (false
negatives). Pruning removes unreliable (high entropy) excitatory patterns,
either by threshold or uniformly at random.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from .events import HistoryWindow, Subsequence, enumerate_subsequences
from .infer import entropy
from .tree import EpstTree, InhibitoryRecord, TreeNode

FALSE_POSITIVE_THRESHOLD = 0.5
DEFAULT_JOINT_THRESHOLD = 3
DEFAULT_FN_THRESHOLD = 3


@dataclass(frozen=True)
class Variant:
    """EPST variant selector: plain, inhibition, pruning, or both."""

    name: str
    inhibition: bool
    pruning: bool


VARIANTS = {
    "epst": Variant("epst", False, False),
    "epst_i": Variant("epst_i", True, False),
    "epst_p": Variant("epst_p", False, True),
    "epst_ip": Variant("epst_ip", True, True),
}


def _is_excitatory(node: TreeNode) -> bool:
    return not node.is_inhibitory and (node.numerator > 0 or node.denominator > 0)


def record_false_positive(tree: EpstTree, window: HistoryWindow) -> int:
    """Store every subsequence of the window (within the tree's length and
    gap limits) that does not already exist as an excitatory pattern as an
    inhibitory node. Returns the number of patterns added."""
    p = tree.params
    added = 0
    for sub in enumerate_subsequences(
        window, p.min_subseq_len, p.max_subseq_len, p.max_spike_interval
    ):
        if sub.items[0][0] > p.max_spike_interval:
            continue
        node = tree.root
        for item in sub.items:
            child = node.children.get(item)
            if child is None:
                child = tree._add_child(node, item)
            node = child
        if _is_excitatory(node) or node.is_inhibitory:
            continue
        node.inhibitory = InhibitoryRecord()
        added += 1
    return added


def _drop_inhibitory(tree: EpstTree, node: TreeNode) -> None:
    """Delete an inhibitory record; remove the node if nothing below it
    survives, trimming bare structural ancestors."""
    node.inhibitory = None
    while (
        node.item is not None
        and not node.children
        and not _is_excitatory(node)
        and not node.is_inhibitory
    ):
        parent = node.parent
        tree.remove_node(node)
        node = parent


def inhibitory_maintenance(
    tree: EpstTree,
    g_spike_occurred: bool,
    matched_inhibitory: Iterable[TreeNode],
    joint_threshold: int = DEFAULT_JOINT_THRESHOLD,
    fn_threshold: int = DEFAULT_FN_THRESHOLD,
) -> List[TreeNode]:
    """After a prediction-vs-outcome comparison: matched inhibitory patterns
    that coincided with an actual g spike caused false negatives; count them
    and destroy records that exceed either threshold. Returns the nodes
    removed."""
    removed = []
    if not g_spike_occurred:
        return removed
    for node in matched_inhibitory:
        rec = node.inhibitory
        if rec is None:
            continue
        rec.joint_count += 1
        rec.false_negative_count += 1
        if rec.joint_count > joint_threshold or rec.false_negative_count > fn_threshold:
            removed.append(node)
            _drop_inhibitory(tree, node)
    return removed


def prune_entropy(tree: EpstTree, entropy_threshold: float, epsilon: float = 1e-12) -> int:
    """Remove excitatory nodes whose entropy exceeds the threshold (plus a
    float-noise epsilon). Subtrees are removed atomically: a node with a
    surviving descendant stays as structure with its counts intact.
    Returns the number of nodes removed."""

    removed = 0

    def walk(node: TreeNode) -> bool:
        """Returns True if `node` survives."""
        nonlocal removed
        survivors = False
        for key in sorted(node.children):
            child = node.children[key]
            if walk(child):
                survivors = True
            else:
                node.detach(key)
                tree.node_count -= 1
                removed += 1
        if node.item is None or survivors or node.is_inhibitory:
            return True
        if node.denominator < 1:
            return False  # bare structure with nothing below it
        return entropy(node.numerator, node.denominator) <= entropy_threshold + epsilon

    walk(tree.root)
    return removed


def prune_random(tree: EpstTree, fraction: float, seed: int) -> int:
    """Remove floor(fraction * node_count) uniformly sampled leaves,
    re-sampling as removals expose new leaves. Deterministic given seed."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    rng = np.random.default_rng(seed)
    target = int(fraction * tree.node_count)
    removed = 0
    for _ in range(target):
        leaves = sorted(
            (n for n in tree.iter_nodes() if not n.children),
            key=lambda n: n.subsequence().sort_key(),
        )
        if not leaves:
            break
        tree.remove_node(leaves[rng.integers(len(leaves))])
        removed += 1
    return removed
