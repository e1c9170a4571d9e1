"""Seed handling shared by the coupling engine, the generators and the bench.

Uniform variates for the coupling come from numpy's counter-based ``Philox``
generator keyed by the master seed, so a variate depends on ``(seed, stream, t)``
alone and never on call order, process or thread.
"""

from functools import lru_cache

import numpy as np

BACKWARD_STREAM = 0
FORWARD_STREAM = 1

_BLOCK = 256
_SEED_MASK = (1 << 64) - 1


def normalize_seed(seed) -> int:
    """Map any integer (or numpy integer) onto the unsigned 64-bit seed space."""
    return int(seed) & _SEED_MASK


@lru_cache(maxsize=4096)
def _uniform_block(seed: int, stream: int, block: int) -> np.ndarray:
    # counter words: [in-block offset, block index, stream, 0]
    counter = (stream << 128) | (block << 64)
    bitgen = np.random.Philox(key=seed, counter=counter)
    values = np.random.Generator(bitgen).random(_BLOCK)
    values.setflags(write=False)
    return values


def uniform_at(seed, t: int, stream: int = BACKWARD_STREAM) -> float:
    """The uniform variate in [0, 1) attached to time index ``t`` of ``stream``."""
    index = abs(int(t))
    block, offset = divmod(index, _BLOCK)
    return float(_uniform_block(normalize_seed(seed), int(stream), block)[offset])


def derive_seed(seed, index: int) -> int:
    """Independent child seed for the ``index``-th sub-task (component, run, sample)."""
    sequence = np.random.SeedSequence(normalize_seed(seed), spawn_key=(int(index),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
