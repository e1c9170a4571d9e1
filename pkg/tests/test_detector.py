import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bench.oracle import brute_force_optimal
from conftest import random_chain, small_graphs
from core.cftp import FlowState, extend_backward, step_map
from core.detector import (
    STOP_COALESCED,
    STOP_DELTA_T,
    STOP_N_MAX,
    STOP_TRIVIAL,
    CriticalEvent,
    DetectorConfig,
    detect_communities,
    find_critical_merges,
    stop_by_delta_t,
)
from core.graph import Graph, Partition, cluster_editing_cost, merge_groups
from utils.exceptions import InvalidArgumentError

TRIANGLES = Partition((frozenset({0, 1, 2}), frozenset({3, 4, 5})))


# --- Config ---

def test_detector_config_validation():
    with pytest.raises(InvalidArgumentError):
        DetectorConfig(delta_t_factor=1.0)
    with pytest.raises(InvalidArgumentError):
        DetectorConfig(cost="modularity")
    with pytest.raises(InvalidArgumentError):
        DetectorConfig(n_max=0)
    with pytest.raises(InvalidArgumentError):
        DetectorConfig(workers=0)


def test_detector_config_from_preset_dict():
    cfg = DetectorConfig.from_dict(
        {"walk": {"r_exp": 1, "laziness": 0.1}, "delta_t_factor": 4, "n_max": 500}, seed=12
    )
    assert cfg.walk.r_exp == 1 and cfg.walk.laziness == 0.1
    assert cfg.delta_t_factor == 4.0 and cfg.n_max == 500 and cfg.seed == 12
    assert cfg.cost_function() is cluster_editing_cost


# --- Critical times ---

def test_critical_event_sorts_and_validates_groups():
    event = CriticalEvent(5, ((4, 2), (1, 0)))
    assert event.merged == ((0, 1), (2, 4))
    assert event.to_dict() == {"time": 5, "merged": [[0, 1], [2, 4]]}
    with pytest.raises(InvalidArgumentError):
        CriticalEvent(5, ((1,),))
    with pytest.raises(InvalidArgumentError):
        CriticalEvent(5, ((0, 1), (1, 2)))


def test_merge_needs_equal_endpoints_and_equal_union_counts():
    current = Partition.singletons(3)
    equal = FlowState(2, np.array([0, 0, 1]), np.array([[1, 1, 0], [2, 0, 0], [0, 0, 2]]))
    assert find_critical_merges(equal, current) == [[0, 1]]

    unequal = FlowState(2, np.array([0, 0, 1]), np.array([[1, 0, 1], [2, 0, 0], [0, 0, 2]]))
    assert find_critical_merges(unequal, current) == []

    apart = FlowState(2, np.array([0, 1, 2]), np.array([[2, 0, 0], [0, 2, 0], [0, 0, 2]]))
    assert find_critical_merges(apart, current) == []


def test_full_coalescence_merges_everything():
    flow = FlowState(3, np.array([2, 2, 2, 2]), np.array([[1, 0, 2, 0], [0, 0, 3, 0], [0, 1, 1, 1], [0, 0, 3, 0]]))
    assert find_critical_merges(flow, Partition.singletons(4)) == [[0, 1, 2, 3]]


def test_pairwise_merges_are_found_to_a_fixed_point():
    flow = FlowState(3, np.array([0, 0, 0]), np.array([[1, 1, 1], [1, 1, 1], [1, 1, 1]]))
    assert find_critical_merges(flow, Partition.singletons(3)) == [[0, 1, 2]]


def test_whole_bucket_merges_when_no_pair_does():
    # every pair has unequal union counts, the three-way union has 3 for everyone
    visits = np.array([[1, 2, 0], [0, 1, 2], [2, 0, 1]])
    flow = FlowState(3, np.array([0, 0, 0]), visits)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        pair = [a, b]
        assert len(set(visits[np.ix_(pair, pair)].sum(axis=1))) == 2
    assert find_critical_merges(flow, Partition.singletons(3)) == [[0, 1, 2]]


def _union_coalesced(flow, states):
    states = sorted(states)
    ends = flow.endpoint[states]
    counts = flow.visits[np.ix_(states, states)].sum(axis=1)
    return bool((ends == ends[0]).all() and (counts == counts[0]).all())


@given(
    st.integers(0, 1_000),
    st.integers(0, 2**32),
    st.integers(1, 30),
    st.lists(st.integers(0, 4), min_size=5, max_size=5),
)
def test_critical_merges_agree_with_exhaustive_subsets(chain_seed, seed, depth, labels):
    chain = random_chain(np.random.default_rng(chain_seed), 5, sparsity=0.5)
    flow = FlowState.initial(5)
    for k in range(1, depth + 1):
        flow = extend_backward(flow, step_map(chain, seed, -k))
    current = Partition.from_labels(labels)
    clusters = current.clusters
    coalesced_unions = {
        combo
        for size in range(2, len(clusters) + 1)
        for combo in itertools.combinations(range(len(clusters)), size)
        if _union_coalesced(flow, [s for i in combo for s in clusters[i]])
    }

    groups = find_critical_merges(flow, current)
    assert all(tuple(group) in coalesced_unions for group in groups)
    merged = merge_groups(current, groups) if groups else current
    for a, b in itertools.combinations(merged.clusters, 2):
        assert not _union_coalesced(flow, a | b)


def test_stop_by_delta_t():
    assert not stop_by_delta_t([3], 100, 2.0)
    assert not stop_by_delta_t([1, 3], 100, None)
    assert stop_by_delta_t([1, 3], 12, 4.0)
    assert not stop_by_delta_t([1, 3], 11, 4.0)


# --- Detection ---

def test_disjoint_triangles_are_found(two_triangles):
    result = detect_communities(two_triangles, DetectorConfig(seed=1))
    assert result.best_partition == TRIANGLES
    assert result.best_cost == 0
    assert result.fully_coalesced
    assert [c.stop_reason for c in result.components] == [STOP_COALESCED, STOP_COALESCED]


def test_isolated_nodes_stay_singletons():
    result = detect_communities(Graph.from_edges(3, []), DetectorConfig())
    assert result.best_partition == Partition.singletons(3)
    assert result.best_cost == 0
    assert result.events == ()
    assert {c.stop_reason for c in result.components} == {STOP_TRIVIAL}


def test_empty_graph_is_rejected():
    with pytest.raises(InvalidArgumentError):
        detect_communities(Graph.from_edges(0, []))


def test_barbell_splits_at_the_bridge(barbell):
    hits = 0
    for seed in range(5):
        result = detect_communities(barbell, DetectorConfig(seed=seed))
        assert result.fully_coalesced
        hits += result.best_partition == TRIANGLES
    assert hits >= 4


def test_detection_is_deterministic(barbell):
    cfg = DetectorConfig(seed=2024)
    assert detect_communities(barbell, cfg).to_dict() == detect_communities(barbell, cfg).to_dict()


def test_workers_do_not_change_the_result():
    g = Graph.from_edges(9, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (5, 6), (7, 8)])
    serial = detect_communities(g, DetectorConfig(seed=5))
    threaded = detect_communities(g, DetectorConfig(seed=5, workers=3))
    assert serial.to_dict() == threaded.to_dict()


def test_history_and_events_are_consistent(barbell):
    result = detect_communities(barbell, DetectorConfig(seed=3))
    component = result.components[0]
    times = [event.time for event in component.events]
    assert times == sorted(times) and len(set(times)) == len(times)
    assert component.history[0] == (0, barbell.num_edges, barbell.n)
    assert component.history[-1][2] == 1
    assert component.best_cost == min(cost for _, cost, _ in component.history)
    assert result.depth_reached == component.depth


def test_depth_cap_reports_non_coalescence(path4):
    result = detect_communities(path4, DetectorConfig(n_max=1, seed=0))
    assert not result.fully_coalesced
    assert result.components[0].stop_reason == STOP_N_MAX
    assert result.failed_components == [result.components[0]]
    assert result.best_partition.covers(4)


def test_delta_t_rule_stops_early():
    # two cliques of five joined by one edge: quick merges inside, long wait across
    edges = [(u, v) for block in (range(5), range(5, 10)) for u in block for v in block if u < v] + [(4, 5)]
    g = Graph.from_edges(10, edges)
    for seed in range(3):
        result = detect_communities(g, DetectorConfig(seed=seed, delta_t_factor=2.0))
        component = result.components[0]
        assert component.stop_reason == STOP_DELTA_T
        assert not result.fully_coalesced
        assert component.depth < DetectorConfig().n_max
        assert result.best_partition.covers(10)


@pytest.mark.parametrize("sizes", [(3, 3, 3), (3, 4, 5, 6), (5, 5, 5, 5, 5)])
def test_disjoint_cliques_are_returned_exactly(sizes):
    edges, blocks, start = [], [], 0
    for size in sizes:
        block = range(start, start + size)
        edges += [(u, v) for u in block for v in block if u < v]
        blocks.append(frozenset(block))
        start += size
    result = detect_communities(Graph.from_edges(start, edges), DetectorConfig(seed=4))
    assert result.best_partition == Partition(tuple(blocks))
    assert result.best_cost == 0


def test_custom_cost_callable_is_used(two_triangles):
    # fewest clusters wins inside each component; the global score counts both
    cfg = DetectorConfig(cost=lambda g, p: len(p), seed=1)
    result = detect_communities(two_triangles, cfg)
    assert result.best_partition == TRIANGLES
    assert result.best_cost == 2


@settings(max_examples=15, deadline=None)
@given(small_graphs(min_nodes=2, max_nodes=7))
def test_detector_never_beats_the_optimum(g):
    result = detect_communities(g, DetectorConfig(seed=11))
    _, optimum = brute_force_optimal(g)
    assert result.best_partition.covers(g.n)
    assert optimum <= result.best_cost <= g.num_edges
    assert result.best_cost == cluster_editing_cost(g, result.best_partition)
