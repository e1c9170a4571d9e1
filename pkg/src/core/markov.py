"""
Finite Markov chains
====================

Row-stochastic chains over an ordered state list, the community random walk
built from common-neighbour counts, stationary distributions by direct linear
solve, and the restriction (watched process) of a chain to a subset of its
states together with the series check used to validate it.

Linear algebra is dense (LAPACK LU with partial pivoting through
``numpy.linalg.solve``); chains here have at most a few thousand states.
"""

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from core.graph import Graph
from utils.exceptions import (
    DegenerateWalkError,
    InvalidArgumentError,
    NumericalError,
    ReducibleChainError,
)
from utils.logger import logger

ROW_TOL = 1e-12
RESTRICT_TOL = 1e-10
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkovChain:
    states: tuple
    matrix: np.ndarray  # matrix[i, j] = p(states[j] | states[i])
    tol: float = field(default=ROW_TOL, repr=False)

    def __post_init__(self):
        states = tuple(self.states)
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidArgumentError(f"Transition matrix must be square, got shape {matrix.shape}.")
        if matrix.shape[0] != len(states):
            raise InvalidArgumentError(f"{len(states)} states but a {matrix.shape[0]}x{matrix.shape[0]} matrix.")
        if len(set(states)) != len(states):
            raise InvalidArgumentError("State ids must be distinct.")
        if matrix.size and (matrix.min() < -self.tol or matrix.max() > 1 + self.tol):
            raise InvalidArgumentError("Transition probabilities must lie in [0, 1].")
        deviation = np.abs(matrix.sum(axis=1) - 1.0)
        if matrix.size and deviation.max() > self.tol:
            row = int(deviation.argmax())
            raise InvalidArgumentError(f"Row {states[row]!r} sums to {matrix[row].sum()!r}, not 1.")
        np.clip(matrix, 0.0, 1.0, out=matrix)
        matrix.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "matrix", matrix)

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def indices_of(self, subset: Iterable) -> list:
        """Positions of ``subset`` in chain order; unknown states are an argument error."""
        subset = list(subset)
        unknown = [s for s in subset if s not in self.index]
        if unknown:
            raise InvalidArgumentError(f"Unknown states: {unknown!r}.")
        return sorted({self.index[s] for s in subset})

    @cached_property
    def cumulative(self) -> np.ndarray:
        """Row-wise inverse-CDF table in ascending state order.

        Entries from the last positive entry of a row onward are ``inf`` so a
        lookup can only land on a state with positive probability.
        """
        cum = np.cumsum(self.matrix, axis=1)
        for i, row in enumerate(self.matrix):
            last = int(np.flatnonzero(row > 0)[-1])
            cum[i, last:] = np.inf
        cum.setflags(write=False)
        return cum

    def transition_digraph(self) -> nx.DiGraph:
        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(self.size))
        rows, cols = np.nonzero(self.matrix > 0)
        digraph.add_edges_from(zip(rows.tolist(), cols.tolist()))
        return digraph

    def to_dict(self) -> dict:
        return {"states": list(self.states), "rows": self.matrix.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, payload: dict) -> "MarkovChain":
        if not isinstance(payload, dict) or "rows" not in payload:
            raise InvalidArgumentError('Chain JSON must be an object with "states" and "rows".')
        rows = payload["rows"]
        states = payload.get("states", list(range(len(rows))))
        return cls(tuple(states), np.asarray(rows, dtype=np.float64))

    @classmethod
    def from_json(cls, text: str) -> "MarkovChain":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidArgumentError(f"Chain file is not valid JSON: {e}") from None
        return cls.from_dict(payload)


@dataclass(frozen=True, eq=False)
class Distribution:
    states: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64, copy=True)
        if probs.shape != (len(self.states),):
            raise InvalidArgumentError("One probability per state is required.")
        if probs.size and (probs.min() < 0 or abs(probs.sum() - 1.0) > ROW_TOL * max(1, probs.size)):
            raise InvalidArgumentError("Probabilities must be non-negative and sum to 1.")
        probs.setflags(write=False)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, state) -> float:
        return float(self.probs[self.states.index(state)])

    def as_dict(self) -> dict:
        return {s: float(p) for s, p in zip(self.states, self.probs)}


@dataclass(frozen=True)
class WalkConfig:
    r_exp: int = 2
    epsilon: float = 1e-3
    laziness: float = 0.05

    def __post_init__(self):
        if int(self.r_exp) != self.r_exp or self.r_exp < 1:
            raise InvalidArgumentError(f"r_exp must be a positive integer, got {self.r_exp!r}.")
        if self.epsilon < 0:
            raise InvalidArgumentError(f"epsilon must be non-negative, got {self.epsilon!r}.")
        if not 0 <= self.laziness < 1:
            raise InvalidArgumentError(f"laziness must lie in [0, 1), got {self.laziness!r}.")
        object.__setattr__(self, "r_exp", int(self.r_exp))

    @classmethod
    def from_dict(cls, settings: dict) -> "WalkConfig":
        settings = settings or {}
        defaults = cls()
        return cls(
            r_exp=settings.get("r_exp", defaults.r_exp),
            epsilon=float(settings.get("epsilon", defaults.epsilon)),
            laziness=float(settings.get("laziness", defaults.laziness)),
        )


# --- Community walk ---

def build_community_walk(g: Graph, cfg: WalkConfig = WalkConfig()) -> MarkovChain:
    """Walk moving along edges with weight ``|N(v) ∩ N(u)|**r_exp + epsilon``, lazily mixed."""
    adjacency = g.adjacency_matrix()
    degrees = adjacency.sum(axis=1)
    isolated = np.flatnonzero(degrees == 0)
    if isolated.size:
        node = int(isolated[0])
        raise DegenerateWalkError(
            f"Node {node} has no neighbours; split components and handle isolated nodes first.", node=node
        )

    common = (adjacency @ adjacency).astype(np.float64)
    weights = np.where(adjacency == 1, common ** cfg.r_exp + cfg.epsilon, 0.0)
    totals = weights.sum(axis=1)
    empty = np.flatnonzero(totals <= 0)
    if empty.size:
        node = int(empty[0])
        raise DegenerateWalkError(
            f"Every edge at node {node} has zero weight (no common neighbours); use epsilon > 0.", node=node
        )

    matrix = (1.0 - cfg.laziness) * weights / totals[:, None]
    matrix[np.diag_indices(g.n)] = cfg.laziness
    return MarkovChain(tuple(range(g.n)), matrix)


# --- Structure checks ---

def is_irreducible(chain: MarkovChain) -> bool:
    return chain.size > 0 and nx.is_strongly_connected(chain.transition_digraph())


def is_aperiodic(chain: MarkovChain) -> bool:
    return chain.size > 0 and nx.is_aperiodic(chain.transition_digraph())


def _unreachable_pair(chain: MarkovChain) -> tuple:
    digraph = chain.transition_digraph()
    reach = nx.descendants(digraph, 0) | {0}
    missing = sorted(set(range(chain.size)) - reach)
    if missing:
        return 0, missing[0]
    for s in range(1, chain.size):
        if 0 not in nx.descendants(digraph, s):
            return s, 0
    return None


def require_irreducible(chain: MarkovChain) -> None:
    if chain.size == 0:
        raise InvalidArgumentError("Chain has no states.")
    pair = _unreachable_pair(chain)
    if pair is not None:
        source, target = pair
        raise ReducibleChainError(source=chain.states[source], target=chain.states[target])


# --- Stationary distribution ---

def stationary(chain: MarkovChain) -> Distribution:
    """Unique fixed point of ``pi = pi Q`` by a direct solve of ``(Q^T - I) pi = 0`` with ``sum(pi) = 1``."""
    require_irreducible(chain)
    if not is_aperiodic(chain):
        logger.warning("Chain is periodic; the stationary law exists but coupling runs may never coalesce.")

    n = chain.size
    system = chain.matrix.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Stationary solve failed: {e}") from None

    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.abs(pi @ chain.matrix - pi).sum())
    if residual >= RESIDUAL_TOL:
        raise NumericalError(f"Stationary residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}.")
    return Distribution(chain.states, pi)


# --- Restriction ---

def split_blocks(chain: MarkovChain, subset: Iterable) -> dict:
    """Index lists and the four blocks ``GG, GB, BG, BB`` of the transition matrix."""
    inside = chain.indices_of(subset)
    if not inside:
        raise InvalidArgumentError("Cannot restrict a chain to an empty subset.")
    outside = [i for i in range(chain.size) if i not in set(inside)]
    q = chain.matrix
    return {
        "G": inside,
        "B": outside,
        "GG": q[np.ix_(inside, inside)],
        "GB": q[np.ix_(inside, outside)],
        "BG": q[np.ix_(outside, inside)],
        "BB": q[np.ix_(outside, outside)],
    }


def restrict(chain: MarkovChain, subset: Iterable) -> MarkovChain:
    """Chain of the process watched only while it is in ``subset``: ``Q_GG + Q_GB (I - Q_BB)^-1 Q_BG``."""
    blocks = split_blocks(chain, subset)
    states = tuple(chain.states[i] for i in blocks["G"])
    if not blocks["B"]:
        return MarkovChain(states, chain.matrix)

    identity = np.eye(len(blocks["B"]))
    try:
        absorbed = np.linalg.solve(identity - blocks["BB"], blocks["BG"])
    except np.linalg.LinAlgError:
        raise NumericalError("I - Q_BB is singular; the chain is not irreducible.") from None
    matrix = blocks["GG"] + blocks["GB"] @ absorbed

    if matrix.min() < -RESTRICT_TOL or np.abs(matrix.sum(axis=1) - 1.0).max() > RESTRICT_TOL:
        raise NumericalError("Restricted chain is not stochastic within tolerance.")
    return MarkovChain(states, np.clip(matrix, 0.0, 1.0), tol=RESTRICT_TOL)


def neumann_check(a, k: int) -> float:
    """``||(I - A)^-1 - sum_{j=0..k} A^j||_inf`` for a square sub-stochastic ``A``."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"Expected a square matrix, got shape {a.shape}.")
    identity = np.eye(a.shape[0])
    inverse = np.linalg.solve(identity - a, identity)
    term = identity.copy()
    partial = identity.copy()
    for _ in range(int(k)):
        term = term @ a
        partial += term
    return float(np.linalg.norm(inverse - partial, ord=np.inf)) if a.size else 0.0


# --- Trajectories ---

def simulate(chain: MarkovChain, start, steps: int, seed) -> list:
    """Trajectory of ``steps`` transitions from ``start`` (states, start included)."""
    rng = np.random.default_rng(seed)
    cum = [list(row) for row in chain.cumulative]
    current = chain.index[start]
    path = [current]
    for u in rng.random(int(steps)).tolist():
        current = bisect_right(cum[current], u)
        path.append(current)
    return [chain.states[i] for i in path]


def empirical_frequencies(samples: Sequence, states: Sequence) -> np.ndarray:
    counts = {s: 0 for s in states}
    for s in samples:
        counts[s] += 1
    total = max(len(samples), 1)
    return np.array([counts[s] / total for s in states])


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)).sum())
