"""Counter-based random streams and worker-count-invariant replicate mapping.

Every Monte Carlo replicate derives its own generator from
``(master_seed, replicate_path)`` through a keyed Philox counter, so results
are bit-identical no matter how replicates are scheduled across workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

THREADS_ENV = "HEAVYQF_THREADS"


@dataclass(frozen=True)
class SeedStream:
    """Immutable handle for a deterministic stream of substreams.

    ``child(i)`` derives an independent substream; ``generator()`` yields the
    numpy Generator for this node. Identical (seed, path) always produces the
    same bits.
    """

    seed: int
    path: tuple[int, ...] = field(default=())

    def child(self, index: int) -> "SeedStream":
        return SeedStream(self.seed, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seed=ss))


def thread_budget(requested: int | None = None) -> int:
    """Resolve the worker count: explicit argument, else HEAVYQF_THREADS, else 1."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return 1


def replicate_map(fn, count: int, workers: int | None = None) -> list:
    """Apply ``fn(i)`` for i in range(count), results ordered by index.

    Replicates must draw randomness only from their own substream; under that
    contract the output is invariant to the worker count.
    """
    n_workers = thread_budget(workers)
    if n_workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, range(count)))
