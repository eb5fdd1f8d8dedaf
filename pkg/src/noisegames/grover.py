"""Search-as-a-game: random sign flips and reflections find a marked item.

Two operators act on n qubits prepared uniform: ``A`` flips the sign of
the marked basis state, ``B = 2|psi><psi| - I`` reflects about the uniform
state.  Played alone, either operator leaves the measurement payoff at
1/2^n.  Played in random alternation the sequence reduces -- A*A = B*B = I
and B fixes the start state -- to an alternating word, and each surviving
``BA`` pair is exactly one Grover iterate, so a player who stops at the
right reduced word measures the marked item with probability
``sin^2((2k+1) * asin(1/sqrt(N)))``.

States are simulated both as full 2^n statevectors and in the invariant
two-dimensional span of the marked state and the uniform rest
(:class:`TwoDState`), which has no practical size limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import rng

FULL_MODE_MAX_QUBITS = 24  # 16M amplitudes; desk-scale memory guard
TWO_D_MAX_QUBITS = 60


@dataclass(frozen=True, slots=True)
class GameConfig:
    """Search instance: n qubits, N = 2^n items, one marked target."""

    n_qubits: int
    target: int = 0

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or not (
            1 <= self.n_qubits <= TWO_D_MAX_QUBITS
        ):
            raise ValueError(f"n_qubits must lie in [1, {TWO_D_MAX_QUBITS}]")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "target", int(self.target))
        if not (0 <= self.target < 2**self.n_qubits):
            raise ValueError("target must lie in [0, 2^n - 1]")

    @property
    def size(self) -> int:
        return 2**self.n_qubits


def _require_full_mode(config: GameConfig) -> None:
    if config.n_qubits > FULL_MODE_MAX_QUBITS:
        raise ValueError(
            f"full statevector mode is capped at {FULL_MODE_MAX_QUBITS} qubits; "
            "use 2d mode"
        )


def uniform_state(config: GameConfig) -> np.ndarray:
    """The uniform superposition as a full statevector."""
    _require_full_mode(config)
    n = config.size
    return np.full(n, 1.0 / math.sqrt(n), dtype=complex)


def apply_A(state: np.ndarray, config: GameConfig) -> np.ndarray:
    """Sign flip of the marked amplitude (full mode)."""
    out = np.array(state, dtype=complex)
    out[config.target] = -out[config.target]
    return out


def apply_B(state: np.ndarray, config: GameConfig) -> np.ndarray:
    """Reflection about the uniform state: amp -> 2*mean - amp (full mode)."""
    out = np.asarray(state, dtype=complex)
    return 2.0 * out.mean() - out


def grover_iterate(state: np.ndarray, config: GameConfig) -> np.ndarray:
    """One step of the composed game operator: A then B."""
    return apply_B(apply_A(state, config), config)


@dataclass(frozen=True, slots=True)
class TwoDState:
    """State in the invariant plane span{marked, uniform-rest}.

    ``c_target`` multiplies the marked basis state; ``c_rest`` multiplies
    the normalized uniform superposition of the other N-1 states.  Both
    game operators preserve this plane, so it simulates any word at any n.
    """

    c_target: complex
    c_rest: complex

    def __post_init__(self):
        object.__setattr__(self, "c_target", complex(self.c_target))
        object.__setattr__(self, "c_rest", complex(self.c_rest))
        norm = abs(self.c_target) ** 2 + abs(self.c_rest) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("two-dimensional state must be normalized")

    @property
    def success(self) -> float:
        """Probability of measuring the marked state."""
        return abs(self.c_target) ** 2


def uniform_2d(config: GameConfig) -> TwoDState:
    n = config.size
    return TwoDState(1.0 / math.sqrt(n), math.sqrt((n - 1.0) / n))


def apply_A_2d(state: TwoDState, config: GameConfig) -> TwoDState:
    return TwoDState(-state.c_target, state.c_rest)


def apply_B_2d(state: TwoDState, config: GameConfig) -> TwoDState:
    n = config.size
    s = 1.0 / math.sqrt(n)
    c = math.sqrt((n - 1.0) / n)
    ct, cr = state.c_target, state.c_rest
    return TwoDState(
        (2.0 * s * s - 1.0) * ct + 2.0 * s * c * cr,
        2.0 * s * c * ct + (2.0 * c * c - 1.0) * cr,
    )


def grover_iterate_2d(state: TwoDState, config: GameConfig) -> TwoDState:
    return apply_B_2d(apply_A_2d(state, config), config)


def embed_2d(state: TwoDState, config: GameConfig) -> np.ndarray:
    """Full statevector carried by a two-dimensional state."""
    _require_full_mode(config)
    n = config.size
    out = np.full(n, state.c_rest / math.sqrt(n - 1.0), dtype=complex)
    out[config.target] = state.c_target
    return out


def success_closed_form(k: int, config: GameConfig) -> float:
    """Success probability after k composed iterates from uniform.

    ``sin^2((2k+1) * asin(1/sqrt(N)))``: each iterate rotates the state by
    twice the initial angle inside the invariant plane.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    theta = math.asin(1.0 / math.sqrt(config.size))
    return math.sin((2 * k + 1) * theta) ** 2


def reduce_word(word: str) -> str:
    """Normal form of an operator word (leftmost letter acts last).

    Adjacent equal letters cancel (both operators square to the identity)
    and a trailing rightmost B is dropped (it fixes the start state).  The
    result is empty or alternates and ends in A.
    """
    reduced: list[str] = []
    for letter in word:
        if letter not in ("A", "B"):
            raise ValueError(f"letters must be 'A' or 'B', got {letter!r}")
        if reduced and reduced[-1] == letter:
            reduced.pop()
        else:
            reduced.append(letter)
    if reduced and reduced[-1] == "B":
        reduced.pop()
    return "".join(reduced)


State = Union[np.ndarray, TwoDState]


def apply_word(word: str, config: GameConfig, mode: str = "full") -> State:
    """Apply an operator word (rightmost letter first) to the uniform state."""
    if mode == "full":
        state: State = uniform_state(config)
        ops = {"A": apply_A, "B": apply_B}
    elif mode == "2d":
        state = uniform_2d(config)
        ops = {"A": apply_A_2d, "B": apply_B_2d}
    else:
        raise ValueError(f"mode must be 'full' or '2d', got {mode!r}")
    for letter in reversed(word):
        if letter not in ops:
            raise ValueError(f"letters must be 'A' or 'B', got {letter!r}")
        state = ops[letter](state, config)
    return state


def word_success(word: str, config: GameConfig) -> float:
    """Probability of measuring the marked state after applying ``word``."""
    state = apply_word(word, config, mode="2d")
    return state.success


def pure_game_payoff(config: GameConfig) -> float:
    """Payoff available from either single-operator game: exactly 1/2^n.

    Under A alone the reachable states are |psi> and A|psi>, both with
    marked-state probability 1/N; under B alone the state never moves.
    """
    return 1.0 / config.size


def quarter_pi_k(config: GameConfig) -> int:
    """The ceil(pi * sqrt(N) / 4) iterate count (not necessarily optimal)."""
    return math.ceil(math.pi * math.sqrt(config.size) / 4.0)


def optimal_k(config: GameConfig) -> int:
    """Iterate count maximizing the closed-form success (ties to smaller k)."""
    k_max = math.ceil(math.pi * math.sqrt(config.size) / 2.0)
    best_k, best = 0, success_closed_form(0, config)
    for k in range(1, k_max + 1):
        val = success_closed_form(k, config)
        if val > best:
            best_k, best = k, val
    return best_k


@dataclass(frozen=True, slots=True)
class FixedHorizon:
    """Stop unconditionally after m random operations."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError("horizon must be a nonnegative integer")
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True, slots=True)
class QuarterPiHorizon:
    """Stop after 4k random operations, k = ceil(pi*sqrt(N)/4)."""


@dataclass(frozen=True, slots=True)
class AdaptiveTracking:
    """Track the reduced word and stop when it equals (BA)^k_star."""

    k_star: int

    def __post_init__(self):
        if int(self.k_star) != self.k_star or self.k_star < 0:
            raise ValueError("k_star must be a nonnegative integer")
        object.__setattr__(self, "k_star", int(self.k_star))


Strategy = Union[FixedHorizon, QuarterPiHorizon, AdaptiveTracking]


@dataclass(frozen=True, slots=True)
class StrategyOutcome:
    """Evaluation of a stopping strategy.

    ``reduced_length_histogram[s]`` counts trials whose reduced word had
    length s at the stop (fixed horizons), or ``stopping_time_histogram[t]``
    counts trials stopped after t operations (adaptive tracking, where the
    win probability is exact and ``censored`` counts trials that hit the
    step cap before reaching the target word).
    """

    win_prob: float
    stderr: float
    reduced_length_histogram: dict[int, int]
    stopping_time_histogram: dict[int, int] | None = None
    censored: int = 0


def _letters_bit(keys: np.ndarray, slot: int) -> np.ndarray:
    """True for letter A, False for letter B (one fair bit per slot)."""
    return (rng.slot_u64(keys, slot) >> np.uint64(63)).astype(bool)


def _walk_reduced_length(s: np.ndarray, is_a: np.ndarray) -> np.ndarray:
    """Advance reduced-word lengths by one random letter (vectorized).

    The reduced word is determined by its length: it alternates and ends
    in A, so its leftmost letter is A when the length is odd and B when it
    is even.  A new letter cancels iff it equals that leftmost letter; at
    length 0 the letter B is absorbed by the start state.
    """
    odd = (s % 2) == 1
    cancels = (s > 0) & (odd == is_a)
    return np.where(cancels, s - 1, np.where((s == 0) & ~is_a, s, s + 1))


def _success_from_lengths(s: np.ndarray, config: GameConfig) -> np.ndarray:
    """Success probability of the reduced word of each length.

    A reduced word of length s contains floor(s/2) B's, hence acts like
    that many composed iterates; the possible leading A only flips the
    marked amplitude's sign and cannot change the payoff.
    """
    theta = math.asin(1.0 / math.sqrt(config.size))
    return np.sin((2.0 * (s // 2) + 1.0) * theta) ** 2


def evaluate_strategy(
    strategy: Strategy,
    config: GameConfig,
    trials: int,
    seed: int,
    threads: int = 1,
    max_adaptive_steps: int = 1_000_000,
) -> StrategyOutcome:
    """Evaluate a stopping strategy for the random-operator game.

    Fixed horizons sample the player's m coin flips, reduce the word
    incrementally, and score it in closed form.  Adaptive tracking wins
    with exactly the closed-form probability of its target word (the
    reduced word hits (BA)^k_star with probability one); its Monte Carlo
    part only samples the stopping-time distribution.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")

    if isinstance(strategy, QuarterPiHorizon):
        strategy = FixedHorizon(4 * quarter_pi_k(config))

    if isinstance(strategy, FixedHorizon):
        m = strategy.m

        def worker(start: int, count: int):
            keys = rng.stream_keys(seed, start, count)
            s = np.zeros(count, dtype=np.int64)
            for step in range(m):
                s = _walk_reduced_length(s, _letters_bit(keys, step))
            succ = _success_from_lengths(s, config)
            hist = np.bincount(s, minlength=m + 1)
            return float(np.sum(succ)), float(np.sum(succ * succ)), hist

        partials = rng.run_blocks(trials, worker, threads=threads)
        total = math.fsum(p[0] for p in partials)
        total2 = math.fsum(p[1] for p in partials)
        hist = np.zeros(m + 1, dtype=np.int64)
        for p in partials:
            hist += p[2]
        mean = total / trials
        if trials > 1:
            var = max(total2 - total * total / trials, 0.0) / (trials - 1)
            stderr = math.sqrt(var / trials)
        else:
            stderr = 0.0
        histogram = {int(s): int(c) for s, c in enumerate(hist) if c}
        return StrategyOutcome(mean, stderr, histogram)

    if isinstance(strategy, AdaptiveTracking):
        target_len = 2 * strategy.k_star

        def worker(start: int, count: int):
            keys = rng.stream_keys(seed, start, count)
            s = np.zeros(count, dtype=np.int64)
            stop_at = np.zeros(count, dtype=np.int64)
            active = np.arange(count)
            step = 0
            if target_len == 0:
                return np.zeros(count, dtype=np.int64), 0
            while active.size and step < max_adaptive_steps:
                s_act = _walk_reduced_length(
                    s[active], _letters_bit(keys[active], step)
                )
                s[active] = s_act
                step += 1
                hit = s_act == target_len
                stop_at[active[hit]] = step
                active = active[~hit]
            return stop_at, int(active.size)

        partials = rng.run_blocks(trials, worker, threads=threads)
        censored = sum(p[1] for p in partials)
        times: dict[int, int] = {}
        for stop_at, _ in partials:
            for t, c in zip(*np.unique(stop_at, return_counts=True)):
                times[int(t)] = times.get(int(t), 0) + int(c)
        win = success_closed_form(strategy.k_star, config)
        length_hist = {target_len: trials - censored}
        return StrategyOutcome(win, 0.0, length_hist, times, censored)

    raise TypeError(f"unknown strategy: {strategy!r}")
