"""Online driver tests: trigger bookkeeping, variants, determinism."""

from epst.datagen import apply_dropout, gen_base
from epst.events import Event, EventStream
from epst.extensions import VARIANTS
from epst.runner import SamplingConfig, run_epst, run_vmm
from epst.tree import EpstParams

from test_tree import random_pairs, stream_from


def test_one_trigger_per_event_time():
    stream = EventStream(
        (Event(5, 0), Event(5, 1), Event(9, 2), Event(14, 0)), 3
    )
    run = run_epst(stream, EpstParams())
    assert run.trigger_times == [5, 9, 14]
    assert len(run.matrices) == 3
    assert all(m.trigger_time == t for m, t in zip(run.matrices, run.trigger_times))


def test_dropped_events_never_trigger():
    base = gen_base(0, 120, 10)
    dropped = apply_dropout(base, 5, p=0.3, onset_time=0)
    run = run_epst(dropped, EpstParams())
    visible_times = sorted({e.time for e in dropped.visible()})
    assert run.trigger_times == visible_times


def test_learning_precedes_prediction():
    # a pattern seen once is already predicted during its second live
    # presentation: the presentation's own denominator pass has diluted
    # every stored pattern to 1/2 by the time the trigger fires, so the
    # correct cell carries exactly that estimate (not 0)
    stream = stream_from([(10, 1), (13, 2), (17, 0), (110, 1), (113, 2)], 3)
    run = run_epst(
        stream,
        EpstParams(branch_extension_threshold=0, min_subseq_len=1),
    )
    idx = run.trigger_times.index(113)
    matrix = run.matrices[idx]
    assert matrix.probability(0, 4) == 0.5
    chosen = matrix.chosen[(0, 4)]
    assert (chosen.numerator, chosen.denominator) == (1, 2)


def test_run_is_deterministic():
    stream = stream_from(random_pairs(21, 150, 5), 5)
    a = run_epst(stream, EpstParams(), VARIANTS["epst_ip"])
    b = run_epst(stream, EpstParams(), VARIANTS["epst_ip"])
    assert a.trigger_times == b.trigger_times
    assert [m.estimates for m in a.matrices] == [m.estimates for m in b.matrices]
    assert [t.dump() for t in a.trees] == [t.dump() for t in b.trees]


def test_plain_variant_never_stores_inhibitory():
    stream = stream_from(random_pairs(22, 150, 5), 5)
    run = run_epst(stream, EpstParams(branch_extension_threshold=0))
    assert all(
        not node.is_inhibitory for tree in run.trees for node in tree.iter_nodes()
    )


def test_pruning_variant_bounds_tree_size():
    stream = stream_from(random_pairs(23, 600, 5), 5)
    params = EpstParams(branch_extension_threshold=0)
    plain = run_epst(stream, params)
    pruned = run_epst(stream, params, VARIANTS["epst_p"])
    assert sum(t.node_count for t in pruned.trees) < sum(
        t.node_count for t in plain.trees
    )


def test_sampling_config_path():
    stream = stream_from(random_pairs(24, 120, 4), 4)
    run = run_epst(stream, EpstParams(), sampling=SamplingConfig(6, 3, seed=1))
    again = run_epst(stream, EpstParams(), sampling=SamplingConfig(6, 3, seed=1))
    assert [m.estimates for m in run.matrices] == [m.estimates for m in again.matrices]


def test_run_vmm_counts_every_event():
    stream = stream_from(random_pairs(25, 80, 4), 4)
    run = run_vmm(stream, "ppmc")
    assert len(run.events) == len(run.probabilities) == 80
    assert all(p is not None for p in run.probabilities[1:])
