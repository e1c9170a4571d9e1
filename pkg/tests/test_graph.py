import json

import pytest
from hypothesis import given

from bench.oracle import pairwise_cost
from conftest import graphs_with_labels, small_graphs
from core.graph import (
    Graph,
    Partition,
    cluster_editing_cost,
    common_neighbor_count,
    format_edge_list,
    format_partition,
    merge_clusters,
    merge_groups,
    parse_edge_list,
    parse_partition,
    read_labeled_edge_list,
)
from utils.exceptions import GraphParseError, InvalidArgumentError


# --- Graph ---

def test_from_edges_builds_symmetric_adjacency():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert g.neighbors(1) == frozenset({0, 2})
    assert g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
    assert g.num_edges == 2
    assert list(g.edges()) == [(0, 1), (1, 2)]


def test_graph_rejects_asymmetric_adjacency():
    with pytest.raises(InvalidArgumentError):
        Graph(2, (frozenset({1}), frozenset()))


def test_graph_rejects_self_loop_and_out_of_range():
    with pytest.raises(InvalidArgumentError):
        Graph.from_edges(2, [(1, 1)])
    with pytest.raises(InvalidArgumentError):
        Graph.from_edges(2, [(0, 2)])


def test_neighbors_of_unknown_node_raises(k3):
    with pytest.raises(InvalidArgumentError):
        k3.neighbors(3)


def test_connected_components_and_subgraph(two_triangles):
    g = Graph.from_edges(8, [(0, 1), (1, 2), (0, 2), (5, 6)])
    assert g.connected_components() == [(0, 1, 2), (3,), (4,), (5, 6), (7,)]

    sub, nodes = g.subgraph([6, 5])
    assert nodes == (5, 6)
    assert sub.n == 2 and sub.has_edge(0, 1)


def test_adjacency_matrix_matches_edges(barbell):
    matrix = barbell.adjacency_matrix()
    assert (matrix == matrix.T).all()
    assert matrix.sum() == 2 * barbell.num_edges
    assert matrix[2, 3] == 1 and matrix[0, 5] == 0


def test_common_neighbor_count(barbell):
    assert common_neighbor_count(barbell, 0, 1) == 1
    assert common_neighbor_count(barbell, 2, 3) == 0
    assert common_neighbor_count(barbell, 1, 3) == 1
    with pytest.raises(InvalidArgumentError):
        common_neighbor_count(barbell, 1, 1)


# --- Partition ---

def test_partition_is_canonical():
    p = Partition((frozenset({5, 3}), frozenset({2, 0}), frozenset({1, 4})))
    assert p.canonical() == [[0, 2], [1, 4], [3, 5]]
    assert p.labels(6) == [0, 1, 0, 2, 1, 2]


def test_partition_rejects_overlap_and_empty_clusters():
    with pytest.raises(InvalidArgumentError):
        Partition((frozenset({0, 1}), frozenset({1, 2})))
    with pytest.raises(InvalidArgumentError):
        Partition((frozenset({0}), frozenset()))


def test_from_labels_and_covers():
    p = Partition.from_labels(["a", "b", "a"])
    assert p.canonical() == [[0, 2], [1]]
    assert p.covers(3)
    assert not p.covers(4)


def test_merge_groups_unions_clusters():
    p = Partition.singletons(5)
    merged = merge_groups(p, [[0, 3], [1, 2]])
    assert merged.canonical() == [[0, 3], [1, 2], [4]]
    assert merge_clusters(merged, [0, 2]).canonical() == [[0, 3, 4], [1, 2]]
    with pytest.raises(InvalidArgumentError):
        merge_groups(p, [[0, 1], [1, 2]])
    with pytest.raises(InvalidArgumentError):
        merge_groups(p, [[0, 7]])


def test_relabel_maps_local_ids():
    p = Partition((frozenset({0, 1}), frozenset({2})))
    assert p.relabel((10, 4, 7)).canonical() == [[4, 10], [7]]


# --- Cost ---

def test_cost_of_true_cliques_is_zero(two_triangles):
    truth = Partition((frozenset({0, 1, 2}), frozenset({3, 4, 5})))
    assert cluster_editing_cost(two_triangles, truth) == 0


def test_cost_of_path_in_one_cluster_is_one():
    p3 = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert cluster_editing_cost(p3, Partition.whole(3)) == 1
    assert cluster_editing_cost(p3, Partition((frozenset({0, 1}), frozenset({2})))) == 1


def test_cost_of_barbell_triangles_is_the_bridge(barbell):
    truth = Partition((frozenset({0, 1, 2}), frozenset({3, 4, 5})))
    assert cluster_editing_cost(barbell, truth) == 1


def test_cost_requires_a_covering_partition(k3):
    with pytest.raises(InvalidArgumentError):
        cluster_editing_cost(k3, Partition((frozenset({0, 1}),)))


@given(small_graphs())
def test_singletons_cost_equals_edge_count(g):
    assert cluster_editing_cost(g, Partition.singletons(g.n)) == g.num_edges


@given(graphs_with_labels())
def test_cost_matches_pairwise_recount(case):
    g, labels = case
    p = Partition.from_labels(labels)
    assert cluster_editing_cost(g, p) == pairwise_cost(g, p)


# --- Files ---

def test_parse_edge_list_skips_comments_and_blank_lines():
    g = parse_edge_list("# a comment\n\n0 1\n  1 2  \n# tail\n")
    assert g.n == 3
    assert list(g.edges()) == [(0, 1), (1, 2)]


def test_parse_edge_list_reports_line_numbers():
    with pytest.raises(GraphParseError) as excinfo:
        parse_edge_list("0 1\n1 x\n")
    assert excinfo.value.line == 2

    with pytest.raises(GraphParseError) as excinfo:
        parse_edge_list("0 1\n2 2\n")
    assert excinfo.value.line == 2

    with pytest.raises(GraphParseError) as excinfo:
        parse_edge_list("0 1 2\n")
    assert excinfo.value.line == 1


def test_parse_edge_list_rejects_negative_ids():
    with pytest.raises(GraphParseError):
        parse_edge_list("0 -1\n")


def test_edge_list_round_trip_keeps_isolated_nodes():
    g = Graph.from_edges(5, [(0, 1), (1, 2)])
    again = parse_edge_list(format_edge_list(g))
    assert again == g


@pytest.mark.parametrize("hint", ["# nodes: many", "# nodes:", "# nodes: -4", "# nodes: 1000000000"])
def test_unusable_node_count_comment_is_ignored(hint):
    g = parse_edge_list(f"{hint}\n0 1\n1 2\n")
    assert g.n == 3


def test_node_count_comment_within_bound_adds_isolated_nodes():
    assert parse_edge_list("# nodes: 6\n0 1\n").n == 6


def test_read_labeled_edge_list_reindexes_densely():
    g, labels = read_labeled_edge_list("1 2\n2 3\n10 3\n")
    assert labels == [1, 2, 3, 10]
    assert list(g.edges()) == [(0, 1), (1, 2), (2, 3)]


def test_partition_json_round_trip_with_extras():
    p = Partition((frozenset({0, 2}), frozenset({1})))
    text = format_partition(p, cost=3)
    assert json.loads(text) == {"clusters": [[0, 2], [1]], "cost": 3}
    assert parse_partition(text) == p


def test_parse_partition_rejects_malformed_input():
    with pytest.raises(InvalidArgumentError):
        parse_partition("not json")
    with pytest.raises(InvalidArgumentError):
        parse_partition('{"groups": []}')
    with pytest.raises(InvalidArgumentError):
        parse_partition('{"clusters": [[0, 1], [1]]}')
