"""Dissipative qubit channel: amplitude damping mixed with a phase rotation.

The channel applies, with probability p, the damping pair
``E0 = ((1, 0), (0, sqrt(1-alpha)))`` and ``E1 = ((0, sqrt(alpha)), (0, 0))``
and, with probability 1-p, the rotation R_z(theta).  Averaging over noisy
parameters (theta centered normal with variance 2*lambda_pd; alpha a
half-normal of scale sqrt(2*lambda_ad), clamped to [0, 1]) relaxes the
populations by ``1 - p*sqrt(4*lambda_ad/pi)`` per step and the coherence by
``p*(1 - sqrt(lambda_ad/pi)) + (1-p)*e^{-lambda_pd}`` to first order in
lambda_ad.  The mixing probability compatible with relaxation no faster
than dephasing is ``(1 - e^{-lambda_pd}) / (1 - e^{-lambda_pd} +
sqrt(lambda_ad/pi))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .qubit import DensityMatrix2, KrausChannel

FIRST_ORDER_LIMIT = 0.01  # default lambda_ad ceiling for first-order formulas


@dataclass(frozen=True, slots=True)
class DampingPhaseParams:
    """Mixing probability p, damping strength alpha, rotation angle theta."""

    p: float
    alpha: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "theta", float(self.theta))
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True, slots=True)
class NoiseScales:
    """Dimensionless amplitude-damping and phase-damping noise scales."""

    lambda_ad: float
    lambda_pd: float

    def __post_init__(self):
        object.__setattr__(self, "lambda_ad", float(self.lambda_ad))
        object.__setattr__(self, "lambda_pd", float(self.lambda_pd))
        for v in (self.lambda_ad, self.lambda_pd):
            if not math.isfinite(v) or v < 0.0:
                raise ValueError("noise scales must be nonnegative")


def build_damping_phase_channel(params: DampingPhaseParams) -> KrausChannel:
    """Three-term Kraus channel (p, E0), (p, E1), (1-p, R_z(theta))."""
    root = math.sqrt(1.0 - params.alpha)
    e0 = ((1.0 + 0.0j, 0.0j), (0.0j, root + 0.0j))
    e1 = ((0.0j, math.sqrt(params.alpha) + 0.0j), (0.0j, 0.0j))
    rot = (
        (cmath.exp(-0.5j * params.theta), 0.0j),
        (0.0j, cmath.exp(0.5j * params.theta)),
    )
    return KrausChannel(((params.p, e0), (params.p, e1), (1.0 - params.p, rot)))


@dataclass(frozen=True, slots=True)
class AveragedChannelResult:
    """Noise-averaged output state with per-entry standard errors.

    ``stderr_pop`` is the standard error of the |0> population estimate;
    ``stderr_coh`` the larger of the standard errors of the real and
    imaginary parts of the coherence.  ``clamp_fraction`` reports how often
    the sampled damping strength had to be clamped into [0, 1].
    """

    rho_avg: DensityMatrix2
    stderr_pop: float
    stderr_coh: float
    clamp_fraction: float
    trials: int


def averaged_channel_mc(
    rho0: DensityMatrix2,
    p: float,
    scales: NoiseScales,
    trials: int,
    seed: int,
    threads: int = 1,
) -> AveragedChannelResult:
    """Average the channel over sampled (alpha, theta) noise parameters.

    theta ~ Normal(0, 2*lambda_pd); alpha = |Normal(0, 2*lambda_ad)|
    clamped to [0, 1].  These laws reproduce every coefficient of the
    first-order averaged matrix: E[alpha] = sqrt(4*lambda_ad/pi),
    E[sqrt(1-alpha)] = 1 - sqrt(lambda_ad/pi) + O(lambda_ad) and
    E[e^{-i theta}] = e^{-lambda_pd}.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    a0, b0 = rho0.a, rho0.b
    sd_theta = math.sqrt(2.0 * scales.lambda_pd)
    sd_x = math.sqrt(2.0 * scales.lambda_ad)

    def channel_outputs(keys: np.ndarray):
        theta = sd_theta * rng.slot_normal(keys, 0)
        alpha_raw = np.abs(sd_x * rng.slot_normal(keys, 1))
        clamped = int(np.count_nonzero(alpha_raw > 1.0))
        alpha = np.minimum(alpha_raw, 1.0)
        a_out = a0 + p * alpha * (1.0 - a0)
        b_out = b0 * (p * np.sqrt(1.0 - alpha) + (1.0 - p) * np.exp(-1j * theta))
        return a_out, b_out, clamped

    a_ref_arr, b_ref_arr, _ = channel_outputs(rng.stream_keys(seed, 0, 1))
    a_ref, b_ref = float(a_ref_arr[0]), complex(b_ref_arr[0])

    def worker(start: int, count: int):
        a_out, b_out, clamped = channel_outputs(rng.stream_keys(seed, start, count))
        da = a_out - a_ref
        db = b_out - b_ref
        re, im = db.real, db.imag
        return (
            float(np.sum(da)),
            float(np.sum(da * da)),
            float(np.sum(re)),
            float(np.sum(im)),
            float(np.sum(re * re)),
            float(np.sum(im * im)),
            clamped,
        )

    partials = rng.run_blocks(trials, worker, threads=threads)
    sum_a = math.fsum(p_[0] for p_ in partials)
    sum_a2 = math.fsum(p_[1] for p_ in partials)
    sum_re = math.fsum(p_[2] for p_ in partials)
    sum_im = math.fsum(p_[3] for p_ in partials)
    sum_re2 = math.fsum(p_[4] for p_ in partials)
    sum_im2 = math.fsum(p_[5] for p_ in partials)
    clamps = sum(p_[6] for p_ in partials)

    mean_a = a_ref + sum_a / trials
    mean_b = b_ref + complex(sum_re / trials, sum_im / trials)
    if trials > 1:
        var_a = max(sum_a2 - sum_a * sum_a / trials, 0.0) / (trials - 1)
        var_re = max(sum_re2 - sum_re * sum_re / trials, 0.0) / (trials - 1)
        var_im = max(sum_im2 - sum_im * sum_im / trials, 0.0) / (trials - 1)
        stderr_pop = math.sqrt(var_a / trials)
        stderr_coh = math.sqrt(max(var_re, var_im) / trials)
    else:
        stderr_pop = stderr_coh = 0.0
    rho = DensityMatrix2(mean_a, mean_b, 1.0 - mean_a)
    return AveragedChannelResult(rho, stderr_pop, stderr_coh, clamps / trials, trials)


def averaged_channel_first_order(
    rho0: DensityMatrix2,
    p: float,
    scales: NoiseScales,
    first_order_limit: float = FIRST_ORDER_LIMIT,
) -> DensityMatrix2:
    """Closed-form noise-averaged state, first order in lambda_ad.

    The population entries are relaxed by ``1 - p*sqrt(4*lambda_ad/pi)``
    and the coherence by ``p*(1 - sqrt(lambda_ad/pi)) +
    (1-p)*e^{-lambda_pd}``, read as density-matrix entries (populations and
    off-diagonal), the only reading consistent with the unaveraged channel.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    if scales.lambda_ad > first_order_limit:
        raise ValueError(
            f"lambda_ad={scales.lambda_ad!r} outside first-order regime "
            f"(limit {first_order_limit!r})"
        )
    relax = 1.0 - p * math.sqrt(4.0 * scales.lambda_ad / math.pi)
    coh = p * (1.0 - math.sqrt(scales.lambda_ad / math.pi)) + (1.0 - p) * math.exp(
        -scales.lambda_pd
    )
    # a + (1-relax)(1-a) == 1 - relax*(1-a), exact when relax == 1
    a = rho0.a + (1.0 - relax) * (1.0 - rho0.a)
    return DensityMatrix2(a, rho0.b * coh, rho0.c * relax)


def max_mixing_probability(scales: NoiseScales) -> float:
    """Largest mixing probability keeping relaxation no faster than dephasing.

    ``(1 - e^{-lambda_pd}) / (1 - e^{-lambda_pd} + sqrt(lambda_ad/pi))``;
    undefined when both scales vanish.
    """
    u = -math.expm1(-scales.lambda_pd)
    v = math.sqrt(scales.lambda_ad / math.pi)
    if u == 0.0 and v == 0.0:
        raise ValueError("mixing bound undefined when both noise scales are zero")
    return u / (u + v)


@dataclass(frozen=True, slots=True)
class RelaxationTimes:
    """Population relaxation time t1 and coherence time t2 (may be inf)."""

    t1: float
    t2: float


def relaxation_times(
    p: float, scales: NoiseScales, tau0: float = 1.0
) -> RelaxationTimes:
    """Relaxation timescales of the noise-averaged channel iterated every tau0.

    With per-step population factor ``g1 = 1 - p*sqrt(4*lambda_ad/pi)`` and
    coherence factor ``g2 = p*(1 - sqrt(lambda_ad/pi)) +
    (1-p)*e^{-lambda_pd}``: ``t1 = -tau0/ln(g1)`` and ``t2 = -2*tau0/ln(g2)``
    (the coherence magnitude decays as ``e^{-2t/t2}``, i.e. with time
    constant t2/2).  Under this convention ``p <= max_mixing_probability``
    is exactly equivalent to ``t1 >= t2/2``, with equality at the bound.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    if tau0 <= 0.0 or not math.isfinite(tau0):
        raise ValueError("tau0 must be positive")
    g1 = 1.0 - p * math.sqrt(4.0 * scales.lambda_ad / math.pi)
    g2 = p * (1.0 - math.sqrt(scales.lambda_ad / math.pi)) + (1.0 - p) * math.exp(
        -scales.lambda_pd
    )
    for g in (g1, g2):
        if g <= 0.0:
            raise ValueError("per-step factor is not positive; out of regime")
        if g > 1.0 + 1e-12:
            raise ValueError("per-step factor exceeds 1; out of regime")
    t1 = math.inf if g1 >= 1.0 else -tau0 / math.log(g1)
    t2 = math.inf if g2 >= 1.0 else -2.0 * tau0 / math.log(g2)
    return RelaxationTimes(t1, t2)
