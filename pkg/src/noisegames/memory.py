"""Correlated phase kicks over two angle classes and their exact recursion.

Each kick depends on the class of the previous one.  Class A is the angle
set {-pi/2, 0, pi/2}; class B is {-3pi/4, eps, pi/4}.  Three kernels are
built: one that stays uniform inside A, one that stays uniform inside B,
and their random half/half combination.  Both pure kernels decay coherence
by 1/3 per step; the combination decays by 2/3 + O(eps) -- random switching
between two equally harmful noise sources retains more coherence than
either source alone.

Every kernel branch lands back inside the two classes (closure), so the
infinite-dimensional kick recursion collapses exactly to two complex
numbers per step, tracked by :func:`coherence_recursion`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .kicks import DeltaMixture, McEstimate, _moments_to_estimate
from .qubit import DensityMatrix2

_ANGLE_TOL = 1e-9  # tolerance for matching an angle to a class support


class SetLabel(enum.Enum):
    SET_A = "A"
    SET_B = "B"


class KernelVariant(enum.Enum):
    PURE_A = "pure-a"
    PURE_B = "pure-b"
    COMBINED = "combined"


def set_a_support() -> tuple[float, float, float]:
    return (-math.pi / 2.0, 0.0, math.pi / 2.0)


def set_b_support(epsilon: float) -> tuple[float, float, float]:
    return (-3.0 * math.pi / 4.0, float(epsilon), math.pi / 4.0)


@dataclass(frozen=True, slots=True)
class KernelBranch:
    """One conditional outcome: weight, kicked angle, destination class."""

    weight: float
    angle: float
    to_label: SetLabel


@dataclass(frozen=True, slots=True)
class MemoryKernel:
    """Conditional kick law P(theta2 | class of theta1) over the two classes.

    Destination classes are part of each branch, so membership is resolved
    by kernel construction rather than set lookup; the recursion therefore
    stays well defined at eps = 0 where the two supports share the angle 0.
    """

    variant: KernelVariant
    epsilon: float
    from_a: tuple[KernelBranch, ...]
    from_b: tuple[KernelBranch, ...]

    def __post_init__(self):
        supports = {
            SetLabel.SET_A: set_a_support(),
            SetLabel.SET_B: set_b_support(self.epsilon),
        }
        for branches in (self.from_a, self.from_b):
            total = math.fsum(br.weight for br in branches)
            if abs(total - 1.0) > 1e-12:
                raise ValueError("branch weights must sum to 1 within 1e-12")
            for br in branches:
                if br.weight < 0.0:
                    raise ValueError("branch weights must be nonnegative")
                if min(abs(br.angle - s) for s in supports[br.to_label]) > _ANGLE_TOL:
                    raise ValueError(
                        f"angle {br.angle!r} is not in the support of {br.to_label}"
                    )

    def branches(self, label: SetLabel) -> tuple[KernelBranch, ...]:
        return self.from_a if label is SetLabel.SET_A else self.from_b

    def as_mixture(self, label: SetLabel) -> DeltaMixture:
        """The conditional kick law from ``label`` as a plain delta mixture."""
        return DeltaMixture(
            tuple((br.weight, br.angle) for br in self.branches(label))
        )


def kernel(variant: KernelVariant, epsilon: float) -> MemoryKernel:
    """Build one of the three kick kernels.

    ``abs(epsilon) < pi/8`` keeps the class-B support distinct.  The
    combined kernel is the half/half mixture of the two pure ones, which
    from class A puts weight 1/2 on the deterministic kick to eps and 1/6
    on each class-A angle (and symmetrically from class B).
    """
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or abs(epsilon) >= math.pi / 8.0:
        raise ValueError("epsilon must satisfy |epsilon| < pi/8")
    a_angles = set_a_support()
    b_angles = set_b_support(epsilon)
    A, B = SetLabel.SET_A, SetLabel.SET_B
    third = 1.0 / 3.0
    sixth = 1.0 / 6.0
    if variant is KernelVariant.PURE_A:
        from_a = tuple(KernelBranch(third, ang, A) for ang in a_angles)
        from_b = (KernelBranch(1.0, 0.0, A),)
    elif variant is KernelVariant.PURE_B:
        from_a = (KernelBranch(1.0, epsilon, B),)
        from_b = tuple(KernelBranch(third, ang, B) for ang in b_angles)
    elif variant is KernelVariant.COMBINED:
        from_a = (KernelBranch(0.5, epsilon, B),) + tuple(
            KernelBranch(sixth, ang, A) for ang in a_angles
        )
        from_b = (KernelBranch(0.5, 0.0, A),) + tuple(
            KernelBranch(sixth, ang, B) for ang in b_angles
        )
    else:
        raise ValueError(f"unknown kernel variant: {variant!r}")
    return MemoryKernel(variant, epsilon, from_a, from_b)


@dataclass(frozen=True, slots=True)
class CoherenceTrace:
    """Values of the kick recursion at the two classes for k = 1..n.

    ``values[k-1]`` is ``(f_k at class A, f_k at class B)``; class A is the
    class of the initial angle 0 and class B the class of eps.
    """

    values: tuple[tuple[complex, complex], ...]

    def __post_init__(self):
        for fa, fb in self.values:
            if abs(fa) > 1.0 + 1e-12 or abs(fb) > 1.0 + 1e-12:
                raise ValueError("recursion values cannot exceed unit magnitude")

    @property
    def final_a(self) -> complex:
        return self.values[-1][0]

    @property
    def final_b(self) -> complex:
        return self.values[-1][1]


def coherence_recursion(kern: MemoryKernel, n: int) -> CoherenceTrace:
    """Exact expectation E[e^{i(theta_1+...+theta_k)} | starting class].

    Step k+1 averages ``e^{i theta} * f_k(destination)`` over the kernel
    branches; phase cancellations inside each class emerge from the full
    branch sums rather than being assumed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    weighted = {
        label: tuple(
            (br.weight * cmath.exp(1j * br.angle), br.to_label)
            for br in kern.branches(label)
        )
        for label in (SetLabel.SET_A, SetLabel.SET_B)
    }
    f = {SetLabel.SET_A: 1.0 + 0.0j, SetLabel.SET_B: 1.0 + 0.0j}
    out = []
    for _ in range(n):
        f = {
            label: sum(coef * f[dest] for coef, dest in weighted[label])
            for label in (SetLabel.SET_A, SetLabel.SET_B)
        }
        out.append((f[SetLabel.SET_A], f[SetLabel.SET_B]))
    return CoherenceTrace(tuple(out))


def effective_decay(kern: MemoryKernel, n: int) -> float:
    """Per-step coherence decay factor sustained by the kernel.

    Geometric mean of the step factors after the first kick,
    ``(abs(f_n) / abs(f_1)) ** (1 / (n - 1))`` at the class of the initial
    angle 0.  The first kick only enters the kernel's recurrent class (a
    deterministic, decay-free move for the pure-B kernel), so including it
    would understate the sustained rate.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    trace = coherence_recursion(kern, n)
    first = abs(trace.values[0][0])
    last = abs(trace.final_a)
    if first == 0.0:
        raise ValueError("recursion vanished at the first step")
    return (last / first) ** (1.0 / (n - 1))


def evolve_memory_mc(
    rho0: DensityMatrix2,
    kern: MemoryKernel,
    n: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo average over sampled kick chains (initial angle 0).

    The chain starts in class A; each step draws a kernel branch for the
    current class, rotates the coherence by e^{-i theta}, and moves to the
    branch's destination class.  The estimate converges to
    ``b * conj(f_n at class A)`` from :func:`coherence_recursion`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    b0 = rho0.b

    tables = {}
    for label in (SetLabel.SET_A, SetLabel.SET_B):
        branches = kern.branches(label)
        cum = np.cumsum([br.weight for br in branches])
        cum[-1] = 1.0
        angles = np.array([br.angle for br in branches])
        to_a = np.array([br.to_label is SetLabel.SET_A for br in branches])
        tables[label] = (cum, angles, to_a)
    cum_a, ang_a, next_a_from_a = tables[SetLabel.SET_A]
    cum_b, ang_b, next_a_from_b = tables[SetLabel.SET_B]

    def chain_phases(keys: np.ndarray) -> np.ndarray:
        in_a = np.ones(len(keys), dtype=bool)
        total = np.zeros(len(keys), dtype=np.float64)
        for s in range(n):
            u = rng.slot_uniform(keys, s)
            ia = np.searchsorted(cum_a, u, side="right")
            ib = np.searchsorted(cum_b, u, side="right")
            total += np.where(in_a, ang_a[ia], ang_b[ib])
            in_a = np.where(in_a, next_a_from_a[ia], next_a_from_b[ib])
        return total

    ref = complex(b0 * np.exp(-1j * chain_phases(rng.stream_keys(seed, 0, 1)))[0])

    def worker(start: int, count: int):
        keys = rng.stream_keys(seed, start, count)
        w = b0 * np.exp(-1j * chain_phases(keys)) - ref
        re, im = w.real, w.imag
        return (
            float(np.sum(re)),
            float(np.sum(im)),
            float(np.sum(re * re)),
            float(np.sum(im * im)),
        )

    partials = rng.run_blocks(trials, worker, threads=threads)
    return _moments_to_estimate(rho0, ref, partials, trials)
