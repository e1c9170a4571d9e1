"""CC-PIVOT baseline for unweighted correlation clustering (edge = similar, non-edge = dissimilar)."""

import numpy as np

from core.graph import Graph, Partition, cluster_editing_cost
from utils.exceptions import InvalidArgumentError
from utils.seeding import derive_seed, normalize_seed


def cc_pivot(g: Graph, seed) -> Partition:
    """Pick a uniformly random unclustered pivot, cluster it with its unclustered neighbours, repeat."""
    rng = np.random.default_rng(normalize_seed(seed))
    # a random permutation visited in order is a sequence of uniform pivot picks
    order = rng.permutation(g.n).tolist()
    unclustered = set(range(g.n))
    clusters = []
    for pivot in order:
        if pivot not in unclustered:
            continue
        cluster = {pivot} | (g.adjacency[pivot] & unclustered)
        unclustered -= cluster
        clusters.append(frozenset(cluster))
    return Partition(tuple(clusters))


def cc_pivot_best(g: Graph, seed, runs: int = 1) -> tuple:
    """Cheapest of ``runs`` independent pivot runs; returns ``(partition, cost)``."""
    if runs < 1:
        raise InvalidArgumentError(f"runs must be at least 1, got {runs}.")
    best, best_cost = None, None
    for i in range(runs):
        partition = cc_pivot(g, seed if runs == 1 else derive_seed(seed, i))
        cost = cluster_editing_cost(g, partition)
        if best_cost is None or cost < best_cost:
            best, best_cost = partition, cost
    return best, best_cost
