"""
Exhaustive oracles for small graphs: every set partition of ``0..n-1`` and
the cluster-editing optimum over them, plus a pair-by-pair recount of the
cost used to cross-check the fast implementation.
"""

from typing import Iterator

import numpy as np

from core.graph import Graph, Partition
from utils.exceptions import InvalidArgumentError

MAX_ORACLE_NODES = 10


def restricted_growth_strings(n: int) -> Iterator[list]:
    """All label vectors ``a`` with ``a[0] = 0`` and ``a[i] <= 1 + max(a[:i])``, in lexicographic order."""
    if n == 0:
        yield []
        return
    labels = [0] * n
    maxima = [0] * n
    while True:
        yield list(labels)
        i = n - 1
        while i > 0 and labels[i] > maxima[i - 1]:
            i -= 1
        if i == 0:
            return
        labels[i] += 1
        maxima[i] = max(maxima[i - 1], labels[i])
        for j in range(i + 1, n):
            labels[j] = 0
            maxima[j] = maxima[i]


def set_partitions(n: int) -> Iterator[Partition]:
    for labels in restricted_growth_strings(n):
        yield Partition.from_labels(labels)


def pairwise_cost(g: Graph, p: Partition) -> int:
    """Cluster-editing cost recounted over every unordered node pair."""
    labels = p.labels(g.n)
    cost = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v) != (labels[u] == labels[v]):
                cost += 1
    return cost


def brute_force_optimal(g: Graph) -> tuple:
    """Minimum cluster-editing partition by enumeration; ties go to the lexicographically smallest canonical form."""
    if g.n > MAX_ORACLE_NODES:
        raise InvalidArgumentError(f"Brute force is limited to {MAX_ORACLE_NODES} nodes, got {g.n}.")
    if g.n == 0:
        return Partition(()), 0

    adjacency = g.adjacency_matrix().astype(bool)
    upper = np.triu(np.ones((g.n, g.n), dtype=bool), 1)
    best, best_cost, best_key = None, None, None
    for labels in restricted_growth_strings(g.n):
        row = np.asarray(labels)
        together = row[:, None] == row[None, :]
        cost = int((upper & (together != adjacency)).sum())
        if best_cost is not None and cost > best_cost:
            continue
        partition = Partition.from_labels(labels)
        key = partition.canonical()
        if best_cost is None or cost < best_cost or key < best_key:
            best, best_cost, best_key = partition, cost, key
    return best, best_cost
