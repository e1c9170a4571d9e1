"""
Coupling from the past
======================

Grand coupling of every state of a finite chain: one uniform variate per time
step drives the inverse-CDF update of every row (states in ascending order).
The variate for time ``t`` comes from a counter-based generator keyed by the
master seed, so randomness is reused exactly when runs are extended further
into the past.

Backward runs are extended one step at a time. Instead of re-simulating all
chains from ``-(k+1)``, the flow ``Phi_k`` (end state at time 0 of the chain
started in each state at time ``-k``) and its visit counts are composed
through the newest map.
"""

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from core.markov import MarkovChain
from utils.exceptions import InvalidArgumentError, NotCoalescedError
from utils.logger import logger
from utils.seeding import BACKWARD_STREAM, FORWARD_STREAM, derive_seed, uniform_at

DEFAULT_N_MAX = 100_000
SCHEDULES = ("unit", "doubling")


@dataclass(frozen=True, eq=False)
class RandomMap:
    t: int
    image: np.ndarray  # image[i]: index of the next state from state index i

    def __post_init__(self):
        image = np.array(self.image, dtype=np.int64, copy=True)
        image.setflags(write=False)
        object.__setattr__(self, "image", image)


@dataclass(frozen=True, eq=False)
class FlowState:
    k: int
    endpoint: np.ndarray  # endpoint[s]: Y_0 of the chain started in s at time -k
    visits: np.ndarray  # visits[s, j]: visits to j among Y_{-(k-1)}, ..., Y_0 on that path

    @classmethod
    def initial(cls, n: int) -> "FlowState":
        return cls(0, np.arange(n, dtype=np.int64), np.zeros((n, n), dtype=np.int64))

    @property
    def size(self) -> int:
        return int(self.endpoint.shape[0])

    @property
    def coalesced(self) -> bool:
        return self.size > 0 and bool((self.endpoint == self.endpoint[0]).all())

    def counts_in(self, subset: Iterable[int]) -> np.ndarray:
        """Visits to ``subset`` of every start state's path (the occupancy count N)."""
        subset = list(subset)
        return self.visits[:, subset].sum(axis=1)


@dataclass(frozen=True)
class CoalescenceReport:
    coalesced: bool
    depth: int
    sample: Optional[object] = None

    def __post_init__(self):
        if self.coalesced != (self.sample is not None):
            raise InvalidArgumentError("A coalescence report carries a sample iff it coalesced.")


# --- Random maps ---

def map_from_uniform(chain: MarkovChain, u: float, t: int = -1) -> RandomMap:
    """The coupled update of every state for one variate ``u`` in [0, 1)."""
    return RandomMap(t, _image(chain.cumulative, u))


def _image(cumulative: np.ndarray, u: float) -> np.ndarray:
    return (cumulative <= u).sum(axis=1)


def _stream(t: int) -> int:
    return BACKWARD_STREAM if t < 0 else FORWARD_STREAM


def step_map(chain: MarkovChain, master_seed, t: int) -> RandomMap:
    """Update map for the step from ``t`` to ``t+1``; a pure function of ``(master_seed, t)``.

    Negative times draw from the backward stream, positive times from a
    disjoint forward stream.
    """
    t = int(t)
    if t == 0:
        raise InvalidArgumentError("Time index 0 has no update map.")
    return map_from_uniform(chain, uniform_at(master_seed, t, _stream(t)), t)


def extend_backward(flow: FlowState, rmap: RandomMap) -> FlowState:
    """Prepend the step from ``-(k+1)`` to ``-k``: ``Phi_{k+1}(s) = Phi_k(image[s])``."""
    if rmap.t != -(flow.k + 1):
        raise InvalidArgumentError(
            f"Flow at depth {flow.k} must be extended with the map for t={-(flow.k + 1)}, got t={rmap.t}."
        )
    if rmap.image.shape[0] != flow.size:
        raise InvalidArgumentError("Map and flow cover different state counts.")
    image = rmap.image
    visits = flow.visits[image].copy()
    visits[np.arange(flow.size), image] += 1
    return FlowState(flow.k + 1, flow.endpoint[image], visits)


def _should_check(depth: int, schedule: str) -> bool:
    return schedule == "unit" or depth & (depth - 1) == 0


# --- Samplers ---

def run_cftp(chain: MarkovChain, seed, n_max: int = DEFAULT_N_MAX, schedule: str = "unit") -> CoalescenceReport:
    """Exact stationary sample: extend backward until all chains meet at time 0.

    ``schedule="doubling"`` inspects coalescence only at depths 1, 2, 4, ...;
    the sample is the same, only the reported depth differs.
    """
    if schedule not in SCHEDULES:
        raise InvalidArgumentError(f"Unknown schedule {schedule!r}; expected one of {SCHEDULES}.")
    if chain.size == 0:
        raise InvalidArgumentError("Cannot sample from a chain without states.")
    cumulative = chain.cumulative
    endpoint = np.arange(chain.size, dtype=np.int64)
    for depth in range(1, int(n_max) + 1):
        endpoint = endpoint[_image(cumulative, uniform_at(seed, -depth, BACKWARD_STREAM))]
        if _should_check(depth, schedule) and (endpoint == endpoint[0]).all():
            return CoalescenceReport(True, depth, chain.states[int(endpoint[0])])
    if (endpoint == endpoint[0]).all():
        return CoalescenceReport(True, int(n_max), chain.states[int(endpoint[0])])
    logger.warning(f"CFTP did not coalesce within {n_max} steps.")
    return CoalescenceReport(False, int(n_max))


def run_partial_cftp(chain: MarkovChain, subset: Iterable, seed, n_max: int = DEFAULT_N_MAX):
    """Sample of the chain watched on ``subset`` via partial coalescence.

    Extends backward until every start state in ``subset`` shares its time-0
    state and its number of visits to ``subset``, then runs forward from that
    common state with fresh randomness until the first visit to ``subset``.
    """
    members = chain.indices_of(subset)
    if not members:
        raise InvalidArgumentError("Partial coalescence needs a non-empty subset.")
    in_subset = np.zeros(chain.size, dtype=np.int64)
    in_subset[members] = 1

    cumulative = chain.cumulative
    endpoint = np.arange(chain.size, dtype=np.int64)
    counts = np.zeros(chain.size, dtype=np.int64)
    for depth in range(1, int(n_max) + 1):
        image = _image(cumulative, uniform_at(seed, -depth, BACKWARD_STREAM))
        endpoint = endpoint[image]
        counts = counts[image] + in_subset[image]
        ends = endpoint[members]
        if (ends == ends[0]).all() and (counts[members] == counts[members[0]]).all():
            break
    else:
        raise NotCoalescedError("Partial CFTP did not coalesce on the subset.", depth=int(n_max))

    state = int(endpoint[members[0]])
    for t in range(1, int(n_max) + 1):
        if in_subset[state]:
            logger.debug(f"Partial coalescence at depth {depth}; entered subset after {t - 1} forward steps.")
            return chain.states[state]
        u = uniform_at(seed, t, FORWARD_STREAM)
        state = int((cumulative[state] <= u).sum())
    if in_subset[state]:
        return chain.states[state]
    raise NotCoalescedError("Forward continuation never entered the subset.", depth=int(n_max))


def sample_stationary(chain: MarkovChain, count: int, seed, n_max: int = DEFAULT_N_MAX,
                      schedule: str = "unit", subset: Optional[Iterable] = None) -> list:
    """``count`` independent exact samples (of the watched chain when ``subset`` is given)."""
    subset = list(subset) if subset is not None else None
    samples = []
    for i in range(int(count)):
        child = derive_seed(seed, i)
        if subset is not None:
            samples.append(run_partial_cftp(chain, subset, child, n_max))
            continue
        report = run_cftp(chain, child, n_max, schedule)
        if not report.coalesced:
            raise NotCoalescedError(f"Sample {i} did not coalesce.", depth=report.depth)
        samples.append(report.sample)
    return samples
