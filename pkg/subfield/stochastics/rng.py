"""Seedable, splittable random streams.

Every random operation in subfield takes an explicit :class:`RngStream`. A
stream is identified by ``(seed, stream_id)`` and drives a counter-based
Philox generator, so the same pair always reproduces the same sequence.
Parallel Monte Carlo work derives child streams with :meth:`RngStream.substream`.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

T = TypeVar("T")
R = TypeVar("R")


def split_stream_id(stream_id: int, index: int) -> int:
    """Derives the child stream id for ``index`` under ``stream_id``.

    SplitMix64 finalizer over the pair, so nearby (stream_id, index) pairs map
    to unrelated 64-bit labels.

    Args:
        stream_id: Parent stream label.
        index: Child counter, >= 0.

    Returns:
        A 64-bit child stream label.
    """
    if index < 0:
        raise ValueError(f"Substream index must be >= 0, got {index}")
    z = (stream_id * 0x9E3779B97F4A7C15 + (index + 1) * 0xD1B54A32D192ED03) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RngStream:
    """A reproducible random stream labelled by ``(seed, stream_id)``."""

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if not 0 <= stream_id <= MASK64:
            raise ValueError(f"stream_id must be a 64-bit unsigned integer, got {stream_id}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        seed_seq = np.random.SeedSequence([self.seed, self.stream_id])
        self.generator = np.random.Generator(np.random.Philox(seed_seq))

    def substream(self, index: int) -> "RngStream":
        """Returns the independent child stream number ``index``."""
        return RngStream(self.seed, split_stream_id(self.stream_id, index))

    def spawn(self, n: int) -> List["RngStream"]:
        """Returns ``n`` independent child streams (indices 0..n-1)."""
        return [self.substream(i) for i in range(n)]

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def parallel_map(fn: Callable[[T], R], tasks: Iterable[T], threads: int = 1) -> List[R]:
    """Maps ``fn`` over ``tasks`` with at most ``threads`` workers.

    Results keep the task order, so reductions over them do not depend on
    scheduling.
    """
    task_list = list(tasks)
    if threads <= 1 or len(task_list) <= 1:
        return [fn(task) for task in task_list]
    workers = min(threads, len(task_list))
    logger.debug(f"Running {len(task_list)} tasks on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, task_list))


def stable_sum(values: Sequence[float]) -> float:
    """Compensated sum of a sequence of floats."""
    return math.fsum(float(v) for v in values)
