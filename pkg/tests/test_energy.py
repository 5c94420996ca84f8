import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import expit

from eraserlab import energy as en
from eraserlab.errors import (
    InvalidSchedule,
    NonPositiveBeta,
    TooManySteps,
    UnnormalizedDistribution,
    ValidationError,
)

LN2 = math.log(2)


def random_schedule(rng, max_steps=20, scale=5.0):
    n = int(rng.integers(1, max_steps + 1))
    return en.GapSchedule(np.concatenate([[0.0], np.sort(rng.uniform(0, scale, n))]))


class TestOccupation:
    def test_values(self):
        assert en.thermal_occupation(0.0, 1.0) == 0.5
        assert en.thermal_occupation(1.0, 1.0) == pytest.approx(math.exp(-1) / (1 + math.exp(-1)))

    def test_no_overflow(self):
        assert en.thermal_occupation(1e6, 1e3) == 0.0

    @pytest.mark.parametrize("beta", [0.0, -1.0, math.inf, math.nan])
    def test_bad_beta(self, beta):
        with pytest.raises(NonPositiveBeta):
            en.thermal_occupation(1.0, beta)


class TestSchedule:
    @pytest.mark.parametrize("e", [[], [1.0, 2.0], [0.0, 2.0, 1.0], [0.0, math.nan]])
    def test_invalid(self, e):
        with pytest.raises(InvalidSchedule):
            en.GapSchedule(e)

    def test_default_shape(self):
        s = en.default_schedule(100, 25.0)
        assert s.steps == 100
        assert s.final_gap == pytest.approx(25.0)
        assert np.all(np.diff(s.energies) >= 0)

    def test_roundtrip(self):
        s = en.default_schedule(7, 3.0)
        np.testing.assert_array_equal(en.GapSchedule.from_dict(s.to_dict()).energies, s.energies)

    def test_default_emax_scales_with_beta(self):
        assert en.default_schedule(10, beta=2.0).final_gap == pytest.approx(12.5)


class TestQuasistatic:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_landauer_limit(self, beta):
        r = en.quasistatic_erase(en.default_schedule(20000, beta=beta), en.ThermalModel(beta))
        assert r.work == pytest.approx(LN2 / beta, abs=1e-3)
        assert r.heat_to_reservoir == pytest.approx(LN2 / beta, abs=1e-3)
        assert r.p_err < 1e-10

    def test_matches_integral(self):
        # dense linear schedule converges to the continuum work integral
        emax = 10.0
        s = en.linear_schedule(200000, emax)
        r = en.quasistatic_erase(s, en.ThermalModel(1.0))
        ref, _ = quad(lambda x: expit(-x), 0, emax, epsabs=1e-13)
        assert r.work == pytest.approx(ref, abs=1e-4)

    def test_trivial_schedule(self):
        r = en.quasistatic_erase(en.GapSchedule([0.0]), en.ThermalModel(1.0))
        assert r == (0.0, 0.0, 0.5)

    def test_work_minus_heat_is_final_energy(self):
        s = random_schedule(np.random.default_rng(3))
        r = en.quasistatic_erase(s, en.ThermalModel(1.3))
        assert r.work - r.heat_to_reservoir == pytest.approx(s.final_gap * r.p_err, abs=1e-14)

    def test_bound(self):
        s = en.default_schedule(50, 8.0)
        m = en.ThermalModel(1.0)
        assert en.quasistatic_erase(s, m).work >= en.mean_work_bound(s, m)


class TestExact:
    def test_means_match_quasistatic(self, backend):
        s = random_schedule(np.random.default_rng(11), 12)
        m = en.ThermalModel(0.8)
        ex = en.work_distribution_exact(s, m)
        qs = en.quasistatic_erase(s, m)
        assert ex.work.mean() == pytest.approx(qs.work, abs=1e-12)
        assert ex.heat_to_reservoir.mean() == pytest.approx(qs.heat_to_reservoir, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 5.0))
    def test_jarzynski_exact(self, seed, beta):
        s = random_schedule(np.random.default_rng(seed), 14)
        m = en.ThermalModel(beta)
        ex = en.work_distribution_exact(s, m)
        assert abs(en.jarzynski_check(ex.work, beta, en.partition_ratio(s, m))) < 1e-12

    def test_jensen(self):
        s = random_schedule(np.random.default_rng(5))
        m = en.ThermalModel(1.0)
        assert en.work_distribution_exact(s, m).work.mean() >= en.free_energy_change(s, m) - 1e-15

    def test_too_many_steps(self):
        with pytest.raises(TooManySteps):
            en.enumerate_trajectories(en.linear_schedule(25, 5.0), en.ThermalModel(1.0))

    def test_jarzynski_rejects_unnormalized(self):
        with pytest.raises(UnnormalizedDistribution):
            en.jarzynski_check(([0.0, 1.0], [0.5, 0.6]), 1.0, 1.0)

    def test_jarzynski_large_work_no_overflow(self):
        dev = en.jarzynski_check(([800.0, 900.0], [0.5, 0.5]), 1.0, 1.0)
        assert dev == pytest.approx(-1.0)


class TestSampling:
    def test_mc_agrees_with_exact(self, backend):
        s = random_schedule(np.random.default_rng(2), 15)
        m = en.ThermalModel(1.0)
        ex = en.work_distribution_exact(s, m)
        b = en.sample_trajectories(s, m, 100_000, seed=9)
        se = math.sqrt(ex.work.variance() / 100_000)
        assert abs(b.work.mean() - ex.work.mean()) < 4 * se
        np.testing.assert_allclose(b.heat_to_reservoir, b.work - s.final_gap * b.final_bit, atol=1e-12)

    def test_reproducible_and_worker_independent(self):
        s = en.default_schedule(30, 10.0)
        m = en.ThermalModel(1.0)
        a = en.sample_trajectories(s, m, 20_000, seed=1)
        b = en.sample_trajectories(s, m, 20_000, seed=1, workers=4)
        np.testing.assert_array_equal(a.work, b.work)
        np.testing.assert_array_equal(a.final_bit, b.final_bit)

    def test_single_trajectory(self):
        s = en.default_schedule(30, 10.0)
        m = en.ThermalModel(1.0)
        r1 = en.sample_trajectory(s, m, 4)
        assert r1 == en.sample_trajectory(s, m, 4)
        assert r1.final_bit in (0, 1)

    def test_rows(self):
        b = en.sample_trajectories(en.linear_schedule(3, 1.0), en.ThermalModel(1.0), 5, seed=0)
        rows = list(b.rows())
        assert len(rows) == len(b) == 5
        assert rows[0].work == b.work[0]


class TestTail:
    def test_tail_bound_20_steps(self):
        s = en.default_schedule(20, beta=1.0)
        m = en.ThermalModel(1.0)
        heat = en.work_distribution_exact(s, m).heat_to_reservoir
        for eps in np.arange(1, 11) / 10:
            P, bound = en.landauer_violation_tail(heat, 1.0, eps)
            assert P < bound

    def test_negative_eps(self):
        with pytest.raises(ValidationError):
            en.landauer_violation_tail(([0.0], [1.0]), 1.0, -0.1)
