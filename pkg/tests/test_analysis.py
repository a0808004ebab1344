import random

import pytest

from dinsim.analysis import ClusterConfig, cluster, filter_links, rule_series
from dinsim.influence import DinWindow

from conftest import flood_fill_clusters, random_link_set


def win(matrix, hits=None, n=10, t0=0.0, t1=1.0, kind="activity", partial=False):
    if hits is None:
        hits = tuple(1 for _ in range(n))
    return DinWindow(t0, t1, kind, partial, tuple(hits), dict(matrix))


# -- cluster ------------------------------------------------------------------


def test_cluster_basic_merges():
    w = win({(0, 1): 0.5, (1, 2): 0.2, (3, 4): -0.4})
    c = cluster([w], 0, ClusterConfig(0.3))
    assert c.clusters == ((0, 1), (3, 4))
    assert 2 not in c.assignment
    assert c.assignment == {0: 0, 1: 0, 3: 3, 4: 3}


def test_threshold_zero_connected_components():
    w = win({(0, 1): 0.01, (1, 2): -0.02, (4, 5): 1.0, (7, 7): 0.3})
    c = cluster([w], 0, ClusterConfig(0.0))
    assert c.clusters == ((0, 1, 2), (4, 5), (7,))


def test_alternating_link_cancels_in_global_mode():
    wins = [win({(0, 1): x}) for x in (0.4, -0.4, 0.4, -0.4)]
    c = cluster(wins, 1, ClusterConfig(0.05, mode="global"))
    assert c.clusters == ()
    # but step mode at any single window clusters them
    c_step = cluster(wins, 1, ClusterConfig(0.05, mode="step"))
    assert c_step.clusters == ((0, 1),)


def test_window_mode_truncates_at_boundaries():
    wins = [win({(0, 1): 1.0}), win({}), win({})]
    # window 0 with half-width 1 spans windows {0, 1}: mean = 0.5
    c = cluster(wins, 0, ClusterConfig(0.6, mode="window", half_width=1))
    assert c.clusters == ()
    c2 = cluster(wins, 0, ClusterConfig(0.4, mode="window", half_width=1))
    assert c2.clusters == ((0, 1),)


def test_window_mode_half_width_zero_equals_step():
    rng = random.Random(0)
    wins = [win(random_link_set(rng)) for _ in range(6)]
    for k in range(len(wins)):
        for thr in (0.0, 0.2, 0.5):
            a = cluster(wins, k, ClusterConfig(thr, mode="window", half_width=0))
            b = cluster(wins, k, ClusterConfig(thr, mode="step"))
            assert a.clusters == b.clusters


def test_pinned_rules_never_cluster():
    w = win({(0, 1): 0.9, (1, 2): 0.9})
    c = cluster([w], 0, ClusterConfig(0.1, pinned=frozenset({1})))
    assert c.clusters == ()
    c2 = cluster([w], 0, ClusterConfig(0.1, pinned=frozenset({0})))
    assert c2.clusters == ((1, 2),)


def test_cluster_oracle_and_monotonicity_random():
    rng = random.Random(1234)
    for _ in range(300):
        links = random_link_set(rng)
        w = win(links)
        thr1 = rng.uniform(0.0, 1.0)
        thr2 = thr1 + rng.uniform(0.0, 0.5)
        c1 = cluster([w], 0, ClusterConfig(thr1))
        assert tuple(sorted(c1.clusters)) == flood_fill_clusters(links, thr1)
        # refinement: every cluster at the higher threshold sits inside one
        # cluster of the lower threshold
        c2 = cluster([w], 0, ClusterConfig(thr2))
        containers = {r: cid for r, cid in c1.assignment.items()}
        for members in c2.clusters:
            owners = {containers[r] for r in members}
            assert len(owners) == 1


def test_cluster_ids_invariant_under_link_permutation():
    rng = random.Random(77)
    links = random_link_set(rng)
    w = win(links)
    base = cluster([w], 0, ClusterConfig(0.2))
    for seed in range(5):
        keys = list(links)
        random.Random(seed).shuffle(keys)
        shuffled = win({k: links[k] for k in keys})
        assert cluster([shuffled], 0, ClusterConfig(0.2)).clusters == base.clusters


def test_cluster_window_index_out_of_range():
    with pytest.raises(IndexError):
        cluster([win({})], 2, ClusterConfig(0.1))


# -- filter_links -------------------------------------------------------------


def test_filter_identity_at_zero():
    w = win({(0, 1): 0.5, (1, 0): -0.6, (2, 3): 0.1}, hits=(5,) * 10)
    out = filter_links(w, 0.0)
    assert out.matrix == w.matrix and out.hits == w.hits


def test_filter_above_max_empties():
    w = win({(0, 1): 0.5, (1, 0): -0.6})
    assert filter_links(w, 0.61).matrix == {}


def test_filter_magnitude():
    w = win({(0, 1): 0.5, (1, 0): -0.6, (2, 3): 0.1})
    out = filter_links(w, 0.4)
    assert out.matrix == {(0, 1): 0.5, (1, 0): -0.6}


# -- rule_series --------------------------------------------------------------


def test_series_gaps_for_never_influenced_rule():
    wins = [win({(0, 1): 0.5}), win({})]
    s = rule_series(wins, 7)
    assert s.incoming == {} and s.outgoing == {}
    assert s.self_series == [None, None]


def test_series_self_projection():
    wins = [win({(3, 3): 0.25}), win({}), win({(3, 3): -0.5})]
    s = rule_series(wins, 3)
    assert s.self_series == [0.25, None, -0.5]
    assert s.incoming[3] == [0.25, None, -0.5]
    assert s.outgoing[3] == [0.25, None, -0.5]


def test_series_matches_window_projection():
    rng = random.Random(5)
    wins = [win(random_link_set(rng)) for _ in range(8)]
    r = 4
    s = rule_series(wins, r)
    for q, series in s.outgoing.items():
        assert series == [w.matrix.get((r, q)) for w in wins]
    for q, series in s.incoming.items():
        assert series == [w.matrix.get((q, r)) for w in wins]
