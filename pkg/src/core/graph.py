"""
Graph and partition types
=========================

Undirected simple graphs over dense node ids ``0..n-1`` and partitions of
their node set, the plain edge-list and partition-JSON file formats, and the
cluster-editing cost used to score partitions.

Both types are immutable after construction and safe to share between
threads.
"""

import io
import json
from dataclasses import dataclass
from itertools import chain as iter_chain
from typing import Iterable, Iterator, Sequence, TextIO, Union

import networkx as nx
import numpy as np

from utils.exceptions import GraphParseError, InvalidArgumentError
from utils.logger import logger

NODE_HINT_PREFIX = "# nodes:"
MAX_NODE_HINT = 10_000_000


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple  # tuple[frozenset[int], ...], one neighbour set per node

    def __post_init__(self):
        adjacency = tuple(frozenset(int(u) for u in nbrs) for nbrs in self.adjacency)
        if self.n < 0 or len(adjacency) != self.n:
            raise InvalidArgumentError(
                f"Graph with n={self.n} needs exactly {max(self.n, 0)} neighbour sets, got {len(adjacency)}."
            )
        for v, nbrs in enumerate(adjacency):
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise InvalidArgumentError(f"Neighbour {u} of node {v} is outside [0, {self.n}).")
                if u == v:
                    raise InvalidArgumentError(f"Self-loop at node {v}.")
                if v not in adjacency[u]:
                    raise InvalidArgumentError(f"Adjacency is not symmetric for edge {v}-{u}.")
        object.__setattr__(self, "adjacency", adjacency)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple]) -> "Graph":
        neighbours = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidArgumentError(f"Edge {u}-{v} is outside [0, {n}).")
            if u == v:
                raise InvalidArgumentError(f"Self-loop at node {u}.")
            neighbours[u].add(v)
            neighbours[v].add(u)
        return cls(n, tuple(neighbours))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """Build from a networkx graph whose nodes are exactly ``0..n-1``."""
        n = graph.number_of_nodes()
        if set(graph.nodes()) != set(range(n)):
            raise InvalidArgumentError("networkx graph nodes must be the integers 0..n-1.")
        return cls.from_edges(n, ((u, v) for u, v in graph.edges() if u != v))

    def neighbors(self, v: int) -> frozenset:
        self._check_node(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @property
    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def edges(self) -> Iterator[tuple]:
        """Edges as ``(u, v)`` with ``u < v`` in ascending order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in sorted(nbrs):
                if u < v:
                    yield u, v

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors(u)

    def adjacency_matrix(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges():
            matrix[u, v] = matrix[v, u] = 1
        return matrix

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def connected_components(self) -> list:
        """Components as sorted node tuples, ordered by their smallest node."""
        components = [tuple(sorted(c)) for c in nx.connected_components(self.to_networkx())]
        return sorted(components, key=lambda c: c[0])

    def subgraph(self, nodes: Iterable[int]) -> tuple:
        """Induced subgraph relabelled to ``0..k-1``; returns ``(graph, nodes)`` with ``nodes[i]`` the original id."""
        nodes = tuple(sorted(set(int(v) for v in nodes)))
        for v in nodes:
            self._check_node(v)
        local = {v: i for i, v in enumerate(nodes)}
        neighbours = [frozenset(local[u] for u in self.adjacency[v] if u in local) for v in nodes]
        return Graph(len(nodes), tuple(neighbours)), nodes

    def _check_node(self, v) -> None:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise InvalidArgumentError(f"Node {v!r} is outside [0, {self.n}).")


@dataclass(frozen=True)
class Partition:
    clusters: tuple  # tuple[frozenset[int], ...] in canonical order (by smallest member)

    def __post_init__(self):
        clusters = [frozenset(int(v) for v in c) for c in self.clusters]
        seen = set()
        for cluster in clusters:
            if not cluster:
                raise InvalidArgumentError("Partition contains an empty cluster.")
            if seen & cluster:
                raise InvalidArgumentError(f"Clusters overlap on nodes {sorted(seen & cluster)}.")
            seen |= cluster
        object.__setattr__(self, "clusters", tuple(sorted(clusters, key=min)))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(frozenset((v,)) for v in range(n)))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls((frozenset(range(n)),) if n else ())

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        groups = {}
        for v, label in enumerate(labels):
            groups.setdefault(label, set()).add(v)
        return cls(tuple(groups.values()))

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def nodes(self) -> frozenset:
        return frozenset(iter_chain.from_iterable(self.clusters))

    def covers(self, n: int) -> bool:
        return sum(len(c) for c in self.clusters) == n and self.nodes == frozenset(range(n))

    def labels(self, n: int) -> list:
        """Cluster index of every node ``0..n-1``."""
        if not self.covers(n):
            raise InvalidArgumentError(f"Partition does not cover nodes 0..{n - 1}.")
        labels = [0] * n
        for index, cluster in enumerate(self.clusters):
            for v in cluster:
                labels[v] = index
        return labels

    def canonical(self) -> list:
        """Sorted node lists ordered by smallest id; the JSON form."""
        return [sorted(c) for c in self.clusters]

    def relabel(self, nodes: Sequence[int]) -> "Partition":
        """Map local ids ``i`` to ``nodes[i]``."""
        return Partition(tuple(frozenset(nodes[v] for v in c) for c in self.clusters))


# --- Neighbourhoods and cost ---

def common_neighbor_count(g: Graph, u: int, v: int) -> int:
    """|N(u) ∩ N(v)|."""
    if u == v:
        raise InvalidArgumentError(f"Common neighbours need two distinct nodes, got {u} twice.")
    return len(g.neighbors(u) & g.neighbors(v))


def cluster_editing_cost(g: Graph, p: Partition) -> int:
    """Edge additions plus deletions turning ``g`` into the disjoint cliques of ``p``."""
    if not p.covers(g.n):
        raise InvalidArgumentError(f"Partition does not cover exactly the nodes 0..{g.n - 1}.")
    missing_inside = 0
    edges_inside = 0
    for cluster in p.clusters:
        size = len(cluster)
        inside = sum(len(g.adjacency[v] & cluster) for v in cluster) // 2
        edges_inside += inside
        missing_inside += size * (size - 1) // 2 - inside
    return missing_inside + (g.num_edges - edges_inside)


def merge_groups(p: Partition, groups: Iterable[Iterable[int]]) -> Partition:
    """Replace each group of cluster indices by the union of its clusters."""
    groups = [sorted(set(int(i) for i in group)) for group in groups]
    used = set()
    for group in groups:
        if not group:
            raise InvalidArgumentError("Cannot merge an empty group of clusters.")
        for index in group:
            if not 0 <= index < len(p.clusters):
                raise InvalidArgumentError(f"Cluster index {index} is outside [0, {len(p.clusters)}).")
            if index in used:
                raise InvalidArgumentError(f"Cluster index {index} appears in more than one group.")
            used.add(index)
    merged = [frozenset().union(*(p.clusters[i] for i in group)) for group in groups]
    untouched = [c for i, c in enumerate(p.clusters) if i not in used]
    return Partition(tuple(merged + untouched))


def merge_clusters(p: Partition, group: Iterable[int]) -> Partition:
    return merge_groups(p, [group])


# --- Edge-list files ---

def _lines(text: Union[str, TextIO, Iterable[str]]) -> Iterable[str]:
    if isinstance(text, str):
        return io.StringIO(text)
    return text


def _node_hint(line: str, line_no: int) -> int:
    """Node count from a ``# nodes: n`` comment; anything unusable is a plain comment."""
    try:
        hint = int(line[len(NODE_HINT_PREFIX):].strip())
    except ValueError:
        return 0
    if not 0 <= hint <= MAX_NODE_HINT:
        logger.warning(f"line {line_no}: ignoring node-count comment outside [0, {MAX_NODE_HINT}].")
        return 0
    return hint


def _parse_pairs(text) -> tuple:
    pairs = []
    node_hint = 0
    for line_no, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.lower().startswith(NODE_HINT_PREFIX):
                node_hint = max(node_hint, _node_hint(line, line_no))
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphParseError(f"expected two node ids, got {len(tokens)} token(s)", line=line_no)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(f"malformed node id in {line!r}", line=line_no) from None
        if u == v:
            raise GraphParseError(f"self-loop at node {u}", line=line_no)
        pairs.append((u, v, line_no))
    return pairs, node_hint


def parse_edge_list(text: Union[str, TextIO, Iterable[str]]) -> Graph:
    """Parse ``u v`` lines (``#`` comments) into a graph over ``0..max id``."""
    pairs, node_hint = _parse_pairs(text)
    for u, v, line_no in pairs:
        if u < 0 or v < 0:
            raise GraphParseError(f"negative node id in pair {u} {v}", line=line_no)
    n = max([node_hint] + [max(u, v) + 1 for u, v, _ in pairs])
    return Graph.from_edges(n, ((u, v) for u, v, _ in pairs))


def read_labeled_edge_list(text: Union[str, TextIO, Iterable[str]]) -> tuple:
    """Parse an edge list with arbitrary integer labels, re-indexed densely in label order.

    Returns ``(graph, labels)`` where ``labels[i]`` is the original label of node ``i``.
    """
    pairs, _ = _parse_pairs(text)
    labels = sorted({u for u, _, _ in pairs} | {v for _, v, _ in pairs})
    index = {label: i for i, label in enumerate(labels)}
    graph = Graph.from_edges(len(labels), ((index[u], index[v]) for u, v, _ in pairs))
    return graph, labels


def format_edge_list(g: Graph) -> str:
    lines = [f"{NODE_HINT_PREFIX} {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


# --- Partition files ---

def partition_to_dict(p: Partition) -> dict:
    return {"clusters": p.canonical()}


def format_partition(p: Partition, **extra) -> str:
    payload = partition_to_dict(p)
    payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def parse_partition(text: str) -> Partition:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"Partition file is not valid JSON: {e}") from None
    if not isinstance(payload, dict) or not isinstance(payload.get("clusters"), list):
        raise InvalidArgumentError('Partition file must be an object with a "clusters" list.')
    try:
        return Partition(tuple(frozenset(int(v) for v in c) for c in payload["clusters"]))
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"Malformed cluster list: {e}") from None
