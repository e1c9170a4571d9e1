"""
Ground-truthed random graphs
============================

- ``gen_sbm``: planted-partition stochastic block model (within-block edge
  probability ``p``, cross-block ``q``), sampled through networkx.
- ``gen_lfr_lite``: a simplified LFR benchmark. Community sizes and degrees
  follow truncated discrete power laws, each node splits its stubs into an
  internal share ``ceil((1 - mu) * degree)`` and an external remainder, stubs
  are paired configuration-model style and defects (self-loops, multi-edges,
  external pairs inside one community) are repaired by random rewiring.
  Unlike the reference benchmark there is no iterative reconciliation of the
  degree and community-size sequences; internal degrees are capped at
  ``community size - 1`` instead.
"""

import math
from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np

from core.graph import Graph, Partition
from utils.exceptions import InvalidArgumentError
from utils.logger import logger

REWIRE_PASSES = 100


@dataclass(frozen=True)
class SbmParams:
    cluster_sizes: tuple
    p: float
    q: float
    seed: int = 0
    relabel: bool = False

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.cluster_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise InvalidArgumentError(f"Cluster sizes must be positive, got {list(self.cluster_sizes)}.")
        if not 0 <= self.q < self.p <= 1:
            raise InvalidArgumentError(f"Need 0 <= q < p <= 1, got p={self.p}, q={self.q}.")
        object.__setattr__(self, "cluster_sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.cluster_sizes)

    def describe(self) -> dict:
        return {"model": "sbm", "sizes": list(self.cluster_sizes), "p": self.p, "q": self.q}


@dataclass(frozen=True)
class LfrParams:
    n: int
    tau1: float = 2.0
    tau2: float = 3.0
    mu: float = 0.25
    avg_deg: float = 30.0
    min_degree: Optional[int] = None
    max_degree: Optional[int] = None
    min_community: Optional[int] = None
    max_community: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgumentError(f"LFR graphs need at least 2 nodes, got n={self.n}.")
        if not (self.tau1 > 1 and self.tau2 > 1):
            raise InvalidArgumentError(f"Power-law exponents must exceed 1, got tau1={self.tau1}, tau2={self.tau2}.")
        if not 0 <= self.mu < 1:
            raise InvalidArgumentError(f"mu must lie in [0, 1), got {self.mu}.")
        if not 0 < self.avg_deg < self.n:
            raise InvalidArgumentError(f"avg_deg must lie in (0, n), got {self.avg_deg}.")
        degrees = self.degree_bounds()
        communities = self.community_bounds()
        if not 1 <= degrees[0] <= degrees[1] <= self.n - 1:
            raise InvalidArgumentError(f"Infeasible degree bounds {degrees} for n={self.n}.")
        if not 1 <= communities[0] <= communities[1] <= self.n:
            raise InvalidArgumentError(f"Infeasible community-size bounds {communities} for n={self.n}.")

    def degree_bounds(self) -> tuple:
        low = self.min_degree if self.min_degree is not None else max(1, int(self.avg_deg // 2))
        high = self.max_degree if self.max_degree is not None else min(self.n - 1, int(math.ceil(1.5 * self.avg_deg)))
        return int(low), int(high)

    def community_bounds(self) -> tuple:
        internal = int(math.ceil((1 - self.mu) * self.degree_bounds()[1]))
        low = self.min_community if self.min_community is not None else min(self.n, internal + 1)
        high = self.max_community if self.max_community is not None else max(low, min(self.n, 2 * low))
        return int(low), int(high)

    def describe(self) -> dict:
        return {"model": "lfr", "n": self.n, "tau1": self.tau1, "tau2": self.tau2, "mu": self.mu,
                "avg_deg": self.avg_deg}


# --- SBM ---

def gen_sbm(params: SbmParams):
    """Sample ``G(n, p, q)`` with the given block sizes; returns ``(graph, truth)``."""
    k = len(params.cluster_sizes)
    probs = [[params.p if i == j else params.q for j in range(k)] for i in range(k)]
    nx_graph = nx.stochastic_block_model(list(params.cluster_sizes), probs, seed=int(params.seed))
    graph = Graph.from_networkx(nx_graph)

    starts = np.cumsum((0,) + params.cluster_sizes[:-1])
    truth = Partition(tuple(frozenset(range(s, s + size)) for s, size in zip(starts, params.cluster_sizes)))
    if not params.relabel:
        return graph, truth

    rng = np.random.default_rng([int(params.seed), 1])
    permutation = rng.permutation(graph.n).tolist()
    shuffled = Graph.from_edges(graph.n, ((permutation[u], permutation[v]) for u, v in graph.edges()))
    return shuffled, truth.relabel(permutation)


# --- LFR-lite ---

def power_law_sample(rng: np.random.Generator, low: int, high: int, exponent: float, size: int) -> np.ndarray:
    """Inverse-transform draws from ``P(x) ∝ x**-exponent`` on the integers ``low..high``."""
    values = np.arange(low, high + 1)
    weights = values.astype(np.float64) ** -exponent
    cdf = np.cumsum(weights / weights.sum())
    cdf[-1] = 1.0
    return values[np.searchsorted(cdf, rng.random(size), side="right")]


def _community_sizes(params: LfrParams, rng: np.random.Generator) -> list:
    low, high = params.community_bounds()
    sizes = []
    while sum(sizes) < params.n:
        sizes.append(int(power_law_sample(rng, low, high, params.tau1, 1)[0]))
    sizes[-1] -= sum(sizes) - params.n
    if sizes[-1] < low and len(sizes) > 1:
        # spread the short remainder over communities that still have room
        leftover = sizes.pop()
        i = 0
        while leftover:
            if sizes[i % len(sizes)] < high:
                sizes[i % len(sizes)] += 1
                leftover -= 1
            elif all(s >= high for s in sizes):
                raise InvalidArgumentError("Community-size bounds cannot cover n nodes.")
            i += 1
    return sizes


def _degrees(params: LfrParams, rng: np.random.Generator) -> np.ndarray:
    low, high = params.degree_bounds()
    raw = power_law_sample(rng, low, high, params.tau2, params.n).astype(np.float64)
    degrees = raw
    scale = 1.0
    for _ in range(20):
        degrees = np.clip(np.rint(raw * scale), low, high)
        mean = degrees.mean()
        if abs(mean - params.avg_deg) <= 0.01 * params.avg_deg:
            break
        scale *= params.avg_deg / mean
    return degrees.astype(np.int64)


def _pair_stubs(stubs: list, rng: np.random.Generator, valid, edges: set) -> list:
    """Configuration-model pairing with rewiring repair; returns the accepted edges."""
    stubs = list(stubs)
    if len(stubs) % 2:
        stubs.pop(int(rng.integers(len(stubs))))
    order = rng.permutation(len(stubs))
    pairs = [(stubs[order[i]], stubs[order[i + 1]]) for i in range(0, len(order), 2)]

    accepted, defects = [], []
    for u, v in pairs:
        key = (min(u, v), max(u, v))
        if valid(u, v) and key not in edges:
            edges.add(key)
            accepted.append(key)
        else:
            defects.append((u, v))

    for _ in range(REWIRE_PASSES):
        if not defects or not accepted:
            break
        remaining = []
        for u, v in defects:
            i = int(rng.integers(len(accepted)))
            x, y = accepted[i]
            first, second = (min(u, x), max(u, x)), (min(v, y), max(v, y))
            if (valid(u, x) and valid(v, y) and first != second
                    and first not in edges and second not in edges):
                edges.discard((x, y))
                edges.add(first)
                edges.add(second)
                accepted[i] = first
                accepted.append(second)
            else:
                remaining.append((u, v))
        defects = remaining
    if defects:
        logger.debug(f"LFR-lite dropped {len(defects)} unrepaired stub pair(s).")
    return accepted


def gen_lfr_lite(params: LfrParams):
    """Simplified LFR benchmark graph; returns ``(graph, truth)``."""
    rng = np.random.default_rng(int(params.seed))
    sizes = _community_sizes(params, rng)
    membership = np.repeat(np.arange(len(sizes)), sizes)
    rng.shuffle(membership)
    degrees = _degrees(params, rng)

    internal = np.minimum(np.ceil((1 - params.mu) * degrees).astype(np.int64),
                          np.array([sizes[c] - 1 for c in membership]))
    external = degrees - np.ceil((1 - params.mu) * degrees).astype(np.int64)

    edges = set()
    for community in range(len(sizes)):
        members = np.flatnonzero(membership == community).tolist()
        stubs = [v for v in members for _ in range(int(internal[v]))]
        _pair_stubs(stubs, rng, lambda u, v: u != v, edges)

    stubs = [v for v in range(params.n) for _ in range(int(external[v]))]
    _pair_stubs(stubs, rng, lambda u, v: membership[u] != membership[v], edges)

    graph = Graph.from_edges(params.n, sorted(edges))
    truth = Partition(tuple(frozenset(np.flatnonzero(membership == c).tolist()) for c in range(len(sizes))))
    logger.debug(f"LFR-lite: {len(sizes)} communities, {graph.num_edges} edges.")
    return graph, truth
