import cmath
import math

import pytest

from noisegames.kicks import (
    DecayFactor,
    DeltaMixture,
    EvolutionPlan,
    ExponentialKicks,
    GaussianKicks,
    char_function,
    char_function_quadrature,
    evolve_iid,
    evolve_iid_mc,
    gaussian_for_target,
    gaussian_from_clock,
    is_decoherence_free,
)
from noisegames.qubit import DensityMatrix2, plus_state
from noisegames.rng import derive_stream

UNIFORM_TRIPLE = DeltaMixture.uniform([-math.pi / 2, 0.0, math.pi / 2])


class TestCharFunction:
    def test_uniform_triple_is_one_third(self):
        df = char_function(UNIFORM_TRIPLE)
        assert abs(df.gamma - 1.0 / 3.0) < 1e-12
        assert df.phi == 0.0

    def test_gaussian_point_mass(self):
        df = char_function(GaussianKicks(0.0, 0.0))
        assert df.gamma == 1.0 and df.phi == 0.0

    def test_exponential_unit_scale(self):
        df = char_function(ExponentialKicks(1.0, 1.0))
        assert df.gamma == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-15)
        assert df.phi == pytest.approx(math.pi / 4.0, abs=1e-15)
        z = char_function_quadrature(ExponentialKicks(1.0, 1.0))
        assert abs(z - df.as_complex) < 1e-9

    @pytest.mark.parametrize("mu", [-2.0, -0.5, 0.0, 1.0, 3.0])
    @pytest.mark.parametrize("sigma2", [0.0, 0.1, 0.5, 2.0, 5.0])
    def test_gaussian_matches_quadrature(self, mu, sigma2):
        dist = GaussianKicks(mu, sigma2)
        assert abs(char_function(dist).as_complex - char_function_quadrature(dist)) < 1e-9

    @pytest.mark.parametrize("omega", [0.1, 0.5, 1.0, 2.0, 8.0])
    @pytest.mark.parametrize("tau1", [0.2, 0.7, 1.0, 1.5, 4.0])
    def test_exponential_matches_quadrature(self, omega, tau1):
        dist = ExponentialKicks(omega, tau1)
        assert abs(char_function(dist).as_complex - char_function_quadrature(dist)) < 1e-9

    def test_magnitude_never_exceeds_one(self):
        stream = derive_stream(21, 0)
        for _ in range(200):
            n = 1 + stream.randint(5)
            w = stream.uniform_open(n)
            angles = (stream.uniform(n) * 2.0 - 1.0) * math.pi
            dist = DeltaMixture(tuple(zip(w / w.sum(), angles)))
            assert char_function(dist).gamma <= 1.0 + 1e-12

    def test_mixture_matches_summed_integral(self):
        stream = derive_stream(22, 0)
        for _ in range(50):
            n = 1 + stream.randint(5)
            w = stream.uniform_open(n)
            angles = (stream.uniform(n) * 2.0 - 1.0) * math.pi
            dist = DeltaMixture(tuple(zip(w / w.sum(), angles)))
            assert abs(char_function(dist).as_complex - char_function_quadrature(dist)) < 1e-9

    def test_decay_factor_validation(self):
        with pytest.raises(ValueError):
            DecayFactor(1.5, 0.0)


class TestEvolveIid:
    def test_zero_steps_unchanged(self):
        rho = DensityMatrix2(0.3, 0.2 - 0.1j, 0.7)
        assert evolve_iid(rho, UNIFORM_TRIPLE, EvolutionPlan(0)) == rho

    def test_uniform_triple_two_steps(self):
        out = evolve_iid(plus_state(), UNIFORM_TRIPLE, EvolutionPlan(2))
        assert abs(out.b - 1.0 / 18.0) < 1e-12
        assert out.a == 0.5 and out.c == 0.5

    def test_inverse_construction_one_step(self):
        dist = gaussian_for_target(0.9, 0.1)
        out = evolve_iid(plus_state(), dist, EvolutionPlan(1))
        assert abs(out.b - 0.5 * 0.9 * cmath.exp(-0.1j)) < 1e-12

    def test_semigroup_exact(self):
        rho = DensityMatrix2(0.4, 0.25 + 0.1j, 0.6)
        for dist in (UNIFORM_TRIPLE, GaussianKicks(0.3, 0.5), ExponentialKicks(1.0, 0.7)):
            once = evolve_iid(rho, dist, EvolutionPlan(13))
            split = evolve_iid(evolve_iid(rho, dist, EvolutionPlan(5)), dist, EvolutionPlan(8))
            assert once == split  # bitwise: same multiplication sequence

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            EvolutionPlan(-1)
        with pytest.raises(ValueError):
            EvolutionPlan(3, 0.0)


class TestEvolveIidMc:
    def test_point_mass_exact(self):
        dist = DeltaMixture.point(0.8)
        est = evolve_iid_mc(plus_state(), dist, EvolutionPlan(3), 1000, seed=1)
        assert est.stderr < 1e-12
        assert abs(est.rho_est.b - 0.5 * cmath.exp(-3 * 0.8j)) < 1e-12

    def test_uniform_triple_one_step(self):
        est = evolve_iid_mc(plus_state(), UNIFORM_TRIPLE, EvolutionPlan(1), 100_000, seed=2)
        exact = 0.5 / 3.0
        assert abs(est.rho_est.b.real - exact) < 3 * est.stderr
        assert abs(est.rho_est.b.imag) < 3 * est.stderr

    def test_gaussian_ten_steps(self):
        est = evolve_iid_mc(
            plus_state(), GaussianKicks(0.0, 0.5), EvolutionPlan(10), 100_000, seed=3
        )
        assert abs(abs(est.rho_est.b) - 0.5 * math.exp(-2.5)) < 3 * est.stderr

    def test_populations_untouched(self):
        rho = DensityMatrix2(0.2, 0.1j, 0.8)
        est = evolve_iid_mc(rho, GaussianKicks(0.1, 0.2), EvolutionPlan(4), 100, seed=4)
        assert est.rho_est.a == rho.a and est.rho_est.c == rho.c

    def test_deterministic_and_thread_invariant(self):
        args = (plus_state(), GaussianKicks(0.2, 0.3), EvolutionPlan(5), 200_000)
        a = evolve_iid_mc(*args, seed=9, threads=1)
        b = evolve_iid_mc(*args, seed=9, threads=8)
        assert a.rho_est == b.rho_est and a.stderr == b.stderr

    def test_error_shrinks_like_root_k(self):
        # 3-sigma bands at trials = 40000 * k for k in {1, 4, 16}.
        exact = evolve_iid(plus_state(), GaussianKicks(0.0, 0.8), EvolutionPlan(3)).b
        for k in (1, 4, 16):
            est = evolve_iid_mc(
                plus_state(), GaussianKicks(0.0, 0.8), EvolutionPlan(3), 40_000 * k, seed=5
            )
            assert abs(est.rho_est.b.real - exact.real) < 3 * est.stderr
            assert abs(est.rho_est.b.imag - exact.imag) < 3 * est.stderr
            assert est.stderr < 1.1 * 0.7 / math.sqrt(40_000 * k)


class TestNamedConstructions:
    def test_clock_at_zero(self):
        dist = gaussian_from_clock(0.0, 2.0)
        assert dist.mu == 0.0 and dist.sigma2 == 0.0

    def test_clock_at_half_pi(self):
        dist = gaussian_from_clock(math.pi / 2.0, 1.0)
        assert dist.mu == pytest.approx(1.0, abs=1e-15)
        assert dist.sigma2 == pytest.approx(2.0, abs=1e-15)

    def test_clock_decay_at_unit_ratio(self):
        dist = gaussian_from_clock(1.0, 1.0)
        df = char_function(dist)
        assert df.gamma == pytest.approx(math.exp(-(1.0 - math.cos(1.0))), abs=1e-15)
        assert df.gamma == pytest.approx(0.6314745151064698, abs=1e-12)
        assert abs(char_function_quadrature(dist) - df.as_complex) < 1e-9

    def test_clock_requires_positive_rate(self):
        with pytest.raises(ValueError):
            gaussian_from_clock(1.0, 0.0)

    def test_target_point_mass(self):
        dist = gaussian_for_target(1.0, 0.0)
        assert dist.sigma2 == 0.0

    def test_target_half(self):
        dist = gaussian_for_target(0.5, 0.2)
        assert dist.mu == 0.2
        assert dist.sigma2 == pytest.approx(2.0 * math.log(2.0), abs=1e-15)
        assert dist.sigma2 == pytest.approx(1.3862943611198906, abs=1e-15)

    def test_target_round_trip(self):
        df = char_function(gaussian_for_target(0.9, -0.3))
        assert abs(df.gamma - 0.9) < 1e-9
        assert abs(df.phi - (-0.3)) < 1e-9

    def test_target_validation(self):
        for bad in (0.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                gaussian_for_target(bad, 0.0)


class TestDecoherenceFree:
    def test_single_delta(self):
        assert is_decoherence_free(DeltaMixture.point(1.3), 1e-9)

    def test_two_pi_spaced(self):
        dist = DeltaMixture(((0.5, 0.7), (0.5, 0.7 + 2.0 * math.pi)))
        assert is_decoherence_free(dist, 1e-9)

    def test_uniform_triple_decays(self):
        assert not is_decoherence_free(UNIFORM_TRIPLE, 1e-9)

    def test_rejects_other_variants(self):
        with pytest.raises(TypeError):
            is_decoherence_free(GaussianKicks(0.0, 0.0), 1e-9)


class TestValidation:
    def test_mixture_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            DeltaMixture(((0.5, 0.0), (0.4, 1.0)))

    def test_mixture_drops_dust_weights(self):
        dist = DeltaMixture(((1.0 - 1e-16, 0.0), (1e-16, 2.0)))
        assert len(dist.pairs) == 1

    def test_exponential_needs_positive_scale(self):
        with pytest.raises(ValueError):
            ExponentialKicks(1.0, 0.0)
        with pytest.raises(ValueError):
            ExponentialKicks(-1.0, 1.0)

    def test_gaussian_needs_nonnegative_variance(self):
        with pytest.raises(ValueError):
            GaussianKicks(0.0, -0.1)
