"""
Community detection from partial coalescence
============================================

One backward coupling run of the community walk per connected component.
Starting from singletons, clusters whose states have met at time 0 and have
equal visit counts to the clusters' union are merged ("critical times"); every
partition produced this way is scored and the cheapest one is returned.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from core.cftp import DEFAULT_N_MAX, FlowState, extend_backward, step_map
from core.graph import Graph, Partition, cluster_editing_cost, merge_groups
from core.markov import WalkConfig, build_community_walk
from utils.exceptions import InvalidArgumentError
from utils.logger import logger
from utils.seeding import derive_seed

FORMAT_VERSION = 1

COST_FUNCTIONS = {
    "cluster_editing": cluster_editing_cost,
}

STOP_COALESCED = "coalesced"
STOP_DELTA_T = "delta_t"
STOP_N_MAX = "n_max"
STOP_TRIVIAL = "trivial"


@dataclass(frozen=True)
class DetectorConfig:
    walk: WalkConfig = field(default_factory=WalkConfig)
    cost: Union[str, Callable] = "cluster_editing"
    delta_t_factor: Optional[float] = None
    n_max: int = DEFAULT_N_MAX
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.delta_t_factor is not None and not self.delta_t_factor > 1:
            raise InvalidArgumentError(f"delta_t_factor must exceed 1, got {self.delta_t_factor!r}.")
        if int(self.n_max) < 1:
            raise InvalidArgumentError(f"n_max must be at least 1, got {self.n_max!r}.")
        if int(self.workers) < 1:
            raise InvalidArgumentError(f"workers must be at least 1, got {self.workers!r}.")
        if isinstance(self.cost, str) and self.cost not in COST_FUNCTIONS:
            raise InvalidArgumentError(f"Unknown cost {self.cost!r}; expected one of {sorted(COST_FUNCTIONS)}.")

    @classmethod
    def from_dict(cls, settings: dict, seed: int = 0) -> "DetectorConfig":
        settings = settings or {}
        defaults = cls()
        delta_t = settings.get("delta_t_factor", defaults.delta_t_factor)
        return cls(
            walk=WalkConfig.from_dict(settings.get("walk")),
            cost=settings.get("cost", defaults.cost),
            delta_t_factor=None if delta_t is None else float(delta_t),
            n_max=int(settings.get("n_max", defaults.n_max)),
            seed=int(seed),
            workers=int(settings.get("workers", defaults.workers)),
        )

    def cost_function(self) -> Callable:
        return COST_FUNCTIONS[self.cost] if isinstance(self.cost, str) else self.cost


@dataclass(frozen=True)
class CriticalEvent:
    time: int
    merged: tuple  # groups; each group lists the smallest node id of every merged cluster

    def __post_init__(self):
        groups = tuple(tuple(sorted(int(c) for c in group)) for group in self.merged)
        seen = set()
        for group in groups:
            if len(group) < 2:
                raise InvalidArgumentError("A merge group needs at least two clusters.")
            if seen & set(group):
                raise InvalidArgumentError("Merge groups at one critical time must be disjoint.")
            seen |= set(group)
        object.__setattr__(self, "merged", tuple(sorted(groups)))

    def to_dict(self) -> dict:
        return {"time": self.time, "merged": [list(group) for group in self.merged]}


@dataclass(frozen=True)
class ComponentResult:
    nodes: tuple
    best_partition: Partition
    best_cost: int
    events: tuple
    stop_reason: str
    depth: int
    history: tuple = ()  # (time, cost, cluster count) of every scored partition

    @property
    def coalesced(self) -> bool:
        return self.stop_reason in (STOP_COALESCED, STOP_TRIVIAL)


@dataclass(frozen=True)
class DetectionResult:
    best_partition: Partition
    best_cost: int
    events: tuple
    fully_coalesced: bool
    depth_reached: int
    components: tuple = ()

    @property
    def failed_components(self) -> list:
        return [c for c in self.components if c.stop_reason == STOP_N_MAX]

    def to_dict(self, labels=None) -> dict:
        payload = {
            "format": FORMAT_VERSION,
            "clusters": self.best_partition.canonical(),
            "cost": int(self.best_cost),
            "events": [event.to_dict() for event in self.events],
            "fully_coalesced": self.fully_coalesced,
            "depth_reached": self.depth_reached,
            "components": [
                {"nodes": list(c.nodes), "stop_reason": c.stop_reason, "depth": c.depth, "cost": int(c.best_cost)}
                for c in self.components
            ],
        }
        if labels is not None:
            payload["labels"] = list(labels)
        return payload


# --- Critical times ---

def _union_counts_equal(visits: np.ndarray, states: list) -> bool:
    counts = visits[np.ix_(states, states)].sum(axis=1)
    return bool((counts == counts[0]).all())


def _first_mergeable_pair(visits: np.ndarray, group_states: list):
    """Lexicographically first pair of groups whose union has equal visit counts, or None."""
    sizes = [len(states) for states in group_states]
    order = [s for states in group_states for s in states]
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    own = np.repeat(np.arange(len(sizes)), sizes)

    per_group = np.add.reduceat(visits[np.ix_(order, order)], starts, axis=1)
    # value[s, y]: visits of state s to (its own group ∪ group y)
    value = per_group + per_group[np.arange(len(order)), own][:, None]
    high = np.maximum.reduceat(value, starts, axis=0)
    low = np.minimum.reduceat(value, starts, axis=0)
    ok = np.maximum(high, high.T) == np.minimum(low, low.T)
    pairs = np.argwhere(np.triu(ok, 1))
    return (int(pairs[0][0]), int(pairs[0][1])) if len(pairs) else None


def find_critical_merges(flow: FlowState, current: Partition) -> list:
    """Groups of cluster indices of ``current`` that partially coalesce at the flow's depth.

    Clusters are bucketed by their common time-0 state (clusters whose states
    disagree are never mergeable). Inside a bucket, pairs are tried in
    ascending smallest-node order and accepted when every state of the union
    has the same number of visits to the union; this repeats to a fixed point.

    On top of the pairwise rule, if several groups remain in a bucket the
    whole bucket is tried as one union last. Pairwise merging can stall on
    a bucket whose full union has equal counts (three clusters, no good
    pair); the extra step merges it, so a fully coalesced flow always ends
    in one cluster.
    """
    buckets = {}
    for index, cluster in enumerate(current.clusters):
        members = sorted(cluster)
        ends = flow.endpoint[members]
        if (ends == ends[0]).all():
            buckets.setdefault(int(ends[0]), []).append(index)

    accepted = []
    for indices in buckets.values():
        if len(indices) < 2:
            continue
        groups = [[index] for index in indices]
        group_states = [sorted(current.clusters[index]) for index in indices]
        while len(groups) > 1:
            pair = _first_mergeable_pair(flow.visits, group_states)
            if pair is None:
                break
            a, b = pair
            groups[a] = groups[a] + groups.pop(b)
            group_states[a] = sorted(group_states[a] + group_states.pop(b))

        if len(groups) > 1:
            everything = sorted(index for group in groups for index in group)
            if _union_counts_equal(flow.visits, sorted(s for states in group_states for s in states)):
                groups = [everything]
        accepted.extend(sorted(group) for group in groups if len(group) > 1)
    return sorted(accepted)


def stop_by_delta_t(event_times: list, depth: int, factor: float) -> bool:
    """True when the gap since the last critical time exceeds ``factor`` times the largest earlier gap."""
    if factor is None or len(event_times) < 2:
        return False
    largest = max(b - a for a, b in zip(event_times, event_times[1:]))
    return depth - event_times[-1] > factor * largest


# --- Detection ---

def _detect_component(g: Graph, nodes: tuple, cfg: DetectorConfig, seed: int) -> ComponentResult:
    cost_of = cfg.cost_function()
    sub, _ = g.subgraph(nodes)
    partition = Partition.singletons(sub.n)
    best, best_cost = partition, cost_of(sub, partition)

    if sub.n == 1:
        return ComponentResult(nodes, best.relabel(nodes), best_cost, (), STOP_TRIVIAL, 0)

    chain = build_community_walk(sub, cfg.walk)
    flow = FlowState.initial(sub.n)
    events, history, times = [], [(0, best_cost, len(partition))], []
    stop_reason = STOP_N_MAX
    for depth in range(1, cfg.n_max + 1):
        flow = extend_backward(flow, step_map(chain, seed, -depth))
        groups = find_critical_merges(flow, partition)
        if groups:
            merged = tuple(tuple(nodes[min(partition.clusters[i])] for i in group) for group in groups)
            partition = merge_groups(partition, groups)
            cost = cost_of(sub, partition)
            events.append(CriticalEvent(depth, merged))
            history.append((depth, cost, len(partition)))
            times.append(depth)
            logger.debug(f"Critical time {depth}: {len(groups)} merge(s), {len(partition)} clusters, cost {cost}.")
            if cost < best_cost:
                best, best_cost = partition, cost
        if len(partition) == 1:
            stop_reason = STOP_COALESCED
            break
        if stop_by_delta_t(times, depth, cfg.delta_t_factor):
            stop_reason = STOP_DELTA_T
            break

    if stop_reason == STOP_N_MAX:
        logger.warning(f"Component of {sub.n} nodes did not coalesce within {cfg.n_max} steps.")
    return ComponentResult(
        nodes, best.relabel(nodes), best_cost, tuple(events), stop_reason, depth, tuple(history)
    )


def _combine_events(components) -> tuple:
    by_time = {}
    for component in components:
        for event in component.events:
            by_time.setdefault(event.time, []).extend(event.merged)
    return tuple(CriticalEvent(time, tuple(groups)) for time, groups in sorted(by_time.items()))


def detect_communities(g: Graph, cfg: DetectorConfig = DetectorConfig()) -> DetectionResult:
    """Best-cost partition over all critical times of one backward run per connected component."""
    if g.n == 0:
        raise InvalidArgumentError("Cannot detect communities in an empty graph.")
    components = g.connected_components()
    jobs = [(nodes, derive_seed(cfg.seed, i)) for i, nodes in enumerate(components)]
    logger.info(f"Detecting communities on {g.n} nodes, {g.num_edges} edges, {len(components)} component(s).")

    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda job: _detect_component(g, job[0], cfg, job[1]), jobs))
    else:
        results = [_detect_component(g, nodes, cfg, seed) for nodes, seed in jobs]

    clusters = tuple(cluster for result in results for cluster in result.best_partition.clusters)
    best = Partition(clusters)
    best_cost = cfg.cost_function()(g, best)
    result = DetectionResult(
        best_partition=best,
        best_cost=best_cost,
        events=_combine_events(results),
        fully_coalesced=all(r.coalesced for r in results),
        depth_reached=max(r.depth for r in results),
        components=tuple(results),
    )
    logger.info(
        f"Best partition: {len(best)} clusters, cost {best_cost}, depth {result.depth_reached}, "
        f"fully coalesced: {result.fully_coalesced}."
    )
    return result
