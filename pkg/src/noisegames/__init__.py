"""Stochastic qubit decoherence and randomness-driven games.

Exact/analytic computations (characteristic functions, two-class kick
recursions, rational Markov-chain rates, closed-form search success) are
paired throughout with seeded, bit-reproducible Monte Carlo counterparts.
"""

from .dissipative import (
    AveragedChannelResult,
    DampingPhaseParams,
    NoiseScales,
    RelaxationTimes,
    averaged_channel_first_order,
    averaged_channel_mc,
    build_damping_phase_channel,
    max_mixing_probability,
    relaxation_times,
)
from .grover import (
    AdaptiveTracking,
    FixedHorizon,
    GameConfig,
    QuarterPiHorizon,
    StrategyOutcome,
    TwoDState,
    apply_word,
    evaluate_strategy,
    grover_iterate,
    optimal_k,
    pure_game_payoff,
    quarter_pi_k,
    reduce_word,
    success_closed_form,
    uniform_state,
)
from .kicks import (
    DecayFactor,
    DeltaMixture,
    EvolutionPlan,
    ExponentialKicks,
    GaussianKicks,
    McEstimate,
    char_function,
    char_function_quadrature,
    evolve_iid,
    evolve_iid_mc,
    gaussian_for_target,
    gaussian_from_clock,
    is_decoherence_free,
)
from .memory import (
    CoherenceTrace,
    KernelVariant,
    MemoryKernel,
    SetLabel,
    coherence_recursion,
    effective_decay,
    evolve_memory_mc,
    kernel,
)
from .parrondo import (
    GAME_A,
    GAME_B,
    CombinedGame,
    GameStats,
    RotationGame,
    WheelPosition,
    combine_even,
    exact_rate,
    general_rates,
    is_winning,
    play_round,
    simulate,
    stationary_distribution,
)
from .qubit import (
    DensityMatrix2,
    GainWitness,
    KrausChannel,
    QubitMapSpec,
    Unitary2,
    apply_channel,
    apply_unitary,
    choi_matrix,
    coherence,
    coherence_gain_witness,
    is_cptp,
    min_eigenvalue,
    off_diagonal_gain_spec,
    plus_state,
    rz,
)
from .rng import Stream, derive_stream

__version__ = "0.1.0"
