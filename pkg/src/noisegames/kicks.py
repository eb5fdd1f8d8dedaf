"""Independent identically distributed phase kicks and their decay factors.

A kick law P(theta) acts on a qubit through repeated random z-rotations.
Its characteristic value ``E[e^{i theta}] = gamma * e^{i phi}`` determines
the exact n-step evolution: populations are untouched and the coherence
picks up a factor ``gamma^n e^{-i n phi}``.  Three laws are supported:

* :class:`DeltaMixture`  -- finitely many angles with probabilities;
* :class:`ExponentialKicks` -- density ``e^{-theta/(omega*tau1)}/(omega*tau1)``
  on theta >= 0, giving ``gamma = (1 + (omega*tau1)^2)^{-1/2}`` and
  ``phi = arctan(omega*tau1)``;
* :class:`GaussianKicks` -- mean mu, variance sigma2, giving
  ``gamma = e^{-sigma2/2}`` and ``phi = mu``.

Every closed form is cross-checkable against adaptive quadrature of the
defining integral via :func:`char_function_quadrature`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad

from . import rng
from .qubit import DensityMatrix2

TWO_PI = 2.0 * math.pi

_WEIGHT_FLOOR = 1e-15  # delta-mixture weights below this are dropped


def canonical_angle(theta: float) -> float:
    """Map an angle to the interval (-pi, pi]."""
    return math.pi - (math.pi - theta) % TWO_PI


@dataclass(frozen=True, slots=True)
class DeltaMixture:
    """Discrete kick law: tuple of (weight, angle) pairs summing to one."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        kept = []
        for w, ang in self.pairs:
            w, ang = float(w), float(ang)
            if not (math.isfinite(w) and math.isfinite(ang)):
                raise ValueError("weights and angles must be finite")
            if w < -_WEIGHT_FLOOR:
                raise ValueError("weights must be nonnegative")
            if w >= _WEIGHT_FLOOR:
                kept.append((w, ang))
        if not kept:
            raise ValueError("mixture needs at least one weighted angle")
        if abs(math.fsum(w for w, _ in kept) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "pairs", tuple(kept))

    @classmethod
    def uniform(cls, angles) -> "DeltaMixture":
        angles = tuple(float(a) for a in angles)
        return cls(tuple((1.0 / len(angles), a) for a in angles))

    @classmethod
    def point(cls, angle: float) -> "DeltaMixture":
        return cls(((1.0, float(angle)),))

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.pairs)

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(a for _, a in self.pairs)


@dataclass(frozen=True, slots=True)
class ExponentialKicks:
    """One-sided exponential kick law with scale omega * tau1 > 0."""

    omega: float
    tau1: float

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "tau1", float(self.tau1))
        s = self.omega * self.tau1
        if not math.isfinite(s) or s <= 0.0:
            raise ValueError("omega * tau1 must be positive")

    @property
    def scale(self) -> float:
        return self.omega * self.tau1


@dataclass(frozen=True, slots=True)
class GaussianKicks:
    """Gaussian kick law with mean mu and variance sigma2 >= 0."""

    mu: float
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma2)):
            raise ValueError("mu and sigma2 must be finite")
        if self.sigma2 < 0.0:
            raise ValueError("sigma2 must be nonnegative")


KickDistribution = Union[DeltaMixture, ExponentialKicks, GaussianKicks]


@dataclass(frozen=True, slots=True)
class DecayFactor:
    """Per-step coherence decay gamma in [0, 1] and phase drift phi."""

    gamma: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "phi", float(self.phi))
        if not (0.0 <= self.gamma <= 1.0 + 1e-12):
            raise ValueError("gamma must lie in [0, 1]")

    @property
    def as_complex(self) -> complex:
        return self.gamma * cmath.exp(1j * self.phi)


@dataclass(frozen=True, slots=True)
class EvolutionPlan:
    """Discrete evolution: ``steps`` kicks, one every ``tau0`` time units."""

    steps: int
    tau0: float = 1.0

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError("steps must be a nonnegative integer")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "tau0", float(self.tau0))
        if not math.isfinite(self.tau0) or self.tau0 <= 0.0:
            raise ValueError("tau0 must be positive")

    @property
    def total_time(self) -> float:
        return self.steps * self.tau0


def char_function(dist: KickDistribution) -> DecayFactor:
    """Characteristic value E[e^{i theta}] of a kick law, in polar form.

    The phase is reported canonically in (-pi, pi].
    """
    if isinstance(dist, DeltaMixture):
        re = math.fsum(w * math.cos(a) for w, a in dist.pairs)
        im = math.fsum(w * math.sin(a) for w, a in dist.pairs)
        gamma = math.hypot(re, im)
        phi = math.atan2(im, re) if gamma > 0.0 else 0.0
        return DecayFactor(min(gamma, 1.0), phi)
    if isinstance(dist, GaussianKicks):
        return DecayFactor(math.exp(-0.5 * dist.sigma2), canonical_angle(dist.mu))
    if isinstance(dist, ExponentialKicks):
        s = dist.scale
        return DecayFactor(1.0 / math.sqrt(1.0 + s * s), math.atan(s))
    raise TypeError(f"unsupported kick distribution: {type(dist).__name__}")


def char_function_quadrature(dist: KickDistribution) -> complex:
    """E[e^{i theta}] by adaptive quadrature of the defining integral.

    Independent oracle for :func:`char_function`: Gaussian laws are
    integrated over [mu - 10 sigma, mu + 10 sigma] and exponential laws
    over [0, 40 * omega * tau1] (tail mass below 1e-12), absolute
    tolerance 1e-11.  Point masses have no density and are summed exactly.
    """
    if isinstance(dist, DeltaMixture):
        re = math.fsum(w * math.cos(a) for w, a in dist.pairs)
        im = math.fsum(w * math.sin(a) for w, a in dist.pairs)
        return complex(re, im)
    if isinstance(dist, GaussianKicks):
        if dist.sigma2 == 0.0:
            return cmath.exp(1j * dist.mu)
        sigma = math.sqrt(dist.sigma2)
        norm = 1.0 / (sigma * math.sqrt(TWO_PI))

        def pdf(t: float) -> float:
            return norm * math.exp(-0.5 * ((t - dist.mu) / sigma) ** 2)

        lo, hi = dist.mu - 10.0 * sigma, dist.mu + 10.0 * sigma
    elif isinstance(dist, ExponentialKicks):
        s = dist.scale

        def pdf(t: float) -> float:
            return math.exp(-t / s) / s

        lo, hi = 0.0, 40.0 * s
    else:
        raise TypeError(f"unsupported kick distribution: {type(dist).__name__}")
    re, _ = quad(lambda t: math.cos(t) * pdf(t), lo, hi, epsabs=1e-11, limit=400)
    im, _ = quad(lambda t: math.sin(t) * pdf(t), lo, hi, epsabs=1e-11, limit=400)
    return complex(re, im)


def evolve_iid(
    rho0: DensityMatrix2, dist: KickDistribution, plan: EvolutionPlan
) -> DensityMatrix2:
    """Exact state after ``plan.steps`` IID kicks.

    Populations are unchanged; the coherence is multiplied once per step by
    ``gamma * e^{-i phi}``.  The per-step factor is applied sequentially,
    so evolving n1 + n2 steps equals evolving n1 then n2 steps bit for bit.
    """
    df = char_function(dist)
    step = df.gamma * cmath.exp(-1j * df.phi)
    b = rho0.b
    for _ in range(plan.steps):
        b = b * step
    return DensityMatrix2(rho0.a, b, rho0.c)


@dataclass(frozen=True, slots=True)
class McEstimate:
    """Monte Carlo state estimate with the standard error of the coherence.

    ``stderr`` is the larger of the sample standard errors of the real and
    imaginary parts of the off-diagonal entry.
    """

    rho_est: DensityMatrix2
    stderr: float
    trials: int


def _moments_to_estimate(
    rho0: DensityMatrix2, ref: complex, partials, trials: int
) -> McEstimate:
    """Combine per-block moments of (sample - ref) into mean and stderr.

    Shifting by the deterministic trajectory-0 value keeps the variance
    formula exact for constant samples and well conditioned otherwise.
    """
    sum_re = math.fsum(p[0] for p in partials)
    sum_im = math.fsum(p[1] for p in partials)
    sum_re2 = math.fsum(p[2] for p in partials)
    sum_im2 = math.fsum(p[3] for p in partials)
    mean = ref + complex(sum_re / trials, sum_im / trials)
    if trials > 1:
        var_re = max(sum_re2 - sum_re * sum_re / trials, 0.0) / (trials - 1)
        var_im = max(sum_im2 - sum_im * sum_im / trials, 0.0) / (trials - 1)
        stderr = math.sqrt(max(var_re, var_im) / trials)
    else:
        stderr = 0.0
    return McEstimate(DensityMatrix2(rho0.a, mean, rho0.c), stderr, trials)


def _sample_angles(
    dist: KickDistribution, keys: np.ndarray, steps: int
) -> np.ndarray:
    """Cumulative kick phase per trajectory; trajectory t reads its own slots."""
    total = np.zeros(len(keys), dtype=np.float64)
    if isinstance(dist, DeltaMixture):
        cum = np.cumsum(np.asarray(dist.weights, dtype=np.float64))
        cum[-1] = 1.0
        angles = np.asarray(dist.angles, dtype=np.float64)
        for s in range(steps):
            u = rng.slot_uniform(keys, s)
            total += angles[np.searchsorted(cum, u, side="right")]
    elif isinstance(dist, GaussianKicks):
        sigma = math.sqrt(dist.sigma2)
        for s in range(steps):
            total += dist.mu + sigma * rng.slot_normal(keys, s)
    elif isinstance(dist, ExponentialKicks):
        scale = dist.scale
        for s in range(steps):
            total += -scale * np.log(rng.slot_uniform_open(keys, s))
    else:
        raise TypeError(f"unsupported kick distribution: {type(dist).__name__}")
    return total


def evolve_iid_mc(
    rho0: DensityMatrix2,
    dist: KickDistribution,
    plan: EvolutionPlan,
    trials: int,
    seed: int,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo average of the kicked state over sampled trajectories.

    Deterministic for fixed (seed, trials) under any thread count:
    trajectory t draws from the stream keyed by (seed, t) and block sums
    are combined in a fixed order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    b0 = rho0.b
    ref = complex(
        b0 * np.exp(-1j * _sample_angles(dist, rng.stream_keys(seed, 0, 1), plan.steps))[0]
    )

    def worker(start: int, count: int):
        keys = rng.stream_keys(seed, start, count)
        total = _sample_angles(dist, keys, plan.steps)
        w = b0 * np.exp(-1j * total) - ref
        re, im = w.real, w.imag
        return (
            float(np.sum(re)),
            float(np.sum(im)),
            float(np.sum(re * re)),
            float(np.sum(im * im)),
        )

    partials = rng.run_blocks(trials, worker, threads=threads)
    return _moments_to_estimate(rho0, ref, partials, trials)


def gaussian_from_clock(omega: float, clock_rate: float) -> GaussianKicks:
    """Gaussian kick law of precession at ``omega`` sampled by a finite clock.

    A coherent rotation advanced in ticks of a clock running at
    ``clock_rate`` dephases like a Gaussian law with
    ``mu = sin(omega/clock_rate)`` and
    ``sigma2 = 2 * (1 - cos(omega/clock_rate))``.
    """
    clock_rate = float(clock_rate)
    if not math.isfinite(clock_rate) or clock_rate <= 0.0:
        raise ValueError("clock_rate must be positive")
    x = float(omega) / clock_rate
    return GaussianKicks(math.sin(x), 2.0 * (1.0 - math.cos(x)))


def gaussian_for_target(gamma: float, phi: float) -> GaussianKicks:
    """Gaussian kick law realizing a prescribed per-step decay factor.

    ``mu = phi`` and ``sigma2 = -2 ln gamma``; round-trips through
    :func:`char_function` to (gamma, phi mod 2 pi) within 1e-9.
    """
    gamma = float(gamma)
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must lie in (0, 1]")
    return GaussianKicks(float(phi), -2.0 * math.log(gamma))


def is_decoherence_free(dist: DeltaMixture, tol: float = 1e-9) -> bool:
    """True iff the mixture causes no decay (gamma = 1 within tol).

    Equivalently: all angles carrying weight are congruent modulo 2 pi
    within tolerance, the only escape from strict decay.
    """
    if not isinstance(dist, DeltaMixture):
        raise TypeError("decoherence-free criterion applies to delta mixtures only")
    return char_function(dist).gamma >= 1.0 - tol
