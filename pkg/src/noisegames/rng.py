"""Deterministic counter-based random streams for reproducible Monte Carlo.

All randomness in this package reduces to a single pure function of
``(seed, stream index, draw slot)`` built on the SplitMix64 finalizer.
Stream ``i`` under master seed ``s`` is the SplitMix64 sequence started at
``stream_key(s, i)``; draw slot ``d`` of that stream is
``mix(key + (d + 1) * GOLDEN)``.  Because no stream carries hidden state,
any partition of trajectories into blocks or threads reproduces results
bit for bit.

Key derivation is injective in the index for a fixed seed (odd multiplier
followed by bijective mixing), so distinct trajectories can never collide
onto the same stream.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15   # SplitMix64 increment
_KEY_MULT = 0xD1342543DE82EF95  # odd multiplier: index -> key stays injective

# Default trajectory-block size for parallel Monte Carlo.  Fixed regardless
# of thread count, so block boundaries (and hence float summation order)
# never depend on the execution schedule.
BLOCK_SIZE = 1 << 16

_T = TypeVar("_T")


def _mix(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over uint64 arrays (wrapping)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _mix_int(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _seed_words(seed: int) -> tuple[int, int]:
    s0 = _mix_int((seed & _MASK64) + _GOLDEN)
    s1 = _mix_int(s0 + _GOLDEN)
    return s0, s1


def stream_key(seed: int, index: int) -> int:
    """Key of stream ``index`` under ``seed`` (pure, injective in index)."""
    s0, s1 = _seed_words(seed)
    k = _mix_int(((index & _MASK64) * _KEY_MULT + s0) & _MASK64)
    return _mix_int(k ^ s1)


def stream_keys(seed: int, start: int, count: int) -> np.ndarray:
    """Keys of streams ``start .. start+count-1``, as a uint64 array.

    Bit-identical to ``stream_key`` applied elementwise.
    """
    s0, s1 = _seed_words(seed)
    idx = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        k = _mix(idx * np.uint64(_KEY_MULT) + np.uint64(s0))
    return _mix(k ^ np.uint64(s1))


def slot_u64(keys: np.ndarray, slot: int) -> np.ndarray:
    """Raw 64-bit draw at ``slot`` for every stream key in ``keys``."""
    offset = np.uint64((_GOLDEN * (slot + 1)) & _MASK64)
    with np.errstate(over="ignore"):
        return _mix(keys + offset)


def slot_uniform(keys: np.ndarray, slot: int) -> np.ndarray:
    """Uniform draws in [0, 1) at ``slot`` (53-bit resolution)."""
    return (slot_u64(keys, slot) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def slot_uniform_open(keys: np.ndarray, slot: int) -> np.ndarray:
    """Uniform draws in (0, 1] at ``slot`` (safe under log)."""
    x = (slot_u64(keys, slot) >> np.uint64(11)).astype(np.float64)
    return (x + 1.0) * 2.0**-53


def slot_normal(keys: np.ndarray, slot: int) -> np.ndarray:
    """One standard normal per key via Box-Muller.

    Normal ``slot`` consumes raw slots ``2*slot`` and ``2*slot + 1``; keep
    normal and uniform slot ranges disjoint within one kernel.
    """
    u1 = slot_uniform_open(keys, 2 * slot)
    u2 = slot_uniform(keys, 2 * slot + 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


class Stream:
    """Sequential view of one derived stream (draws advance a slot cursor)."""

    __slots__ = ("key", "_slot")

    def __init__(self, key: int):
        self.key = key & _MASK64
        self._slot = 0

    def _take(self, n: int) -> np.ndarray:
        keys = np.full(n, self.key, dtype=np.uint64)
        slots = (np.arange(self._slot, self._slot + n, dtype=np.uint64) + np.uint64(1))
        with np.errstate(over="ignore"):
            out = _mix(keys + slots * np.uint64(_GOLDEN))
        self._slot += n
        return out

    def u64(self, n: int = 1) -> np.ndarray:
        return self._take(n)

    def uniform(self, n: int = 1) -> np.ndarray:
        return (self._take(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform_open(self, n: int = 1) -> np.ndarray:
        x = (self._take(n) >> np.uint64(11)).astype(np.float64)
        return (x + 1.0) * 2.0**-53

    def normal(self, n: int = 1) -> np.ndarray:
        u1 = self.uniform_open(n)
        u2 = self.uniform(n)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def randint(self, bound: int) -> int:
        """Integer in [0, bound) from one draw (bias below bound * 2**-53)."""
        if bound <= 0:
            raise ValueError("randint bound must be positive")
        x = int(self._take(1)[0]) >> 11
        return (x * bound) >> 53


def derive_stream(master_seed: int, index: int) -> Stream:
    """Independent stream for ``(master_seed, index)``.

    Deterministic and platform-independent; streams for distinct indices
    under the same seed have distinct keys (and in particular distinct
    first outputs).
    """
    return Stream(stream_key(master_seed, index))


def run_blocks(
    total: int,
    worker: Callable[[int, int], _T],
    threads: int = 1,
    block_size: int = BLOCK_SIZE,
) -> list[_T]:
    """Apply ``worker(start, count)`` over fixed-size index blocks.

    Returns the per-block results in block order.  Block boundaries depend
    only on ``total`` and ``block_size``, never on ``threads``; a caller
    that combines the partial results in list order therefore gets
    bit-identical totals for any thread count.  ``worker`` must be a pure
    function of its arguments.
    """
    if total < 0:
        raise ValueError("total must be nonnegative")
    starts = list(range(0, total, block_size))
    counts = [min(block_size, total - s) for s in starts]
    if threads <= 1 or len(starts) <= 1:
        return [worker(s, c) for s, c in zip(starts, counts)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, starts, counts))
