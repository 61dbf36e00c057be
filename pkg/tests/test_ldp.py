import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyldp import (
    LimitGenerator,
    RateFunction,
    ScalePair,
    SimConfig,
    cumulant,
    cumulant_prime,
    grid_legendre,
    rate_function,
    simulate_limit,
    tilt,
)


def gaussian_generator(drift: float, sigma2: float) -> LimitGenerator:
    return LimitGenerator(
        drift=drift,
        sigma2=sigma2,
        jump_sizes=np.empty(0),
        jump_intensities=np.empty(0),
        a_tilde=drift,
        a0_tilde=0.0,
        c_tilde=sigma2,
        c0_tilde=0.0,
    )


class TestRateFunction:
    def test_zero_at_mean(self, two_state_setup):
        _, _, _, gen = two_state_setup
        value, lam = rate_function(gen, gen.a_tilde)
        assert abs(value) <= 1e-12
        assert abs(lam) <= 1e-10
        assert value >= -1e-12

    def test_positive_away_from_mean(self, two_state_setup):
        _, _, _, gen = two_state_setup
        for x in (gen.a_tilde - 0.5, gen.a_tilde + 0.5):
            value, _ = rate_function(gen, x)
            assert value > 1e-3

    def test_gaussian_closed_form(self):
        gen = gaussian_generator(0.5, 3.8)
        value, lam = rate_function(gen, 2.5)
        assert value == pytest.approx((2.5 - 0.5) ** 2 / (2 * 3.8), abs=1e-9)
        assert value == pytest.approx(0.526315789473684, abs=1e-9)
        assert lam == pytest.approx(2.0 / 3.8, abs=1e-9)

    def test_dual_point_solves_stationarity(self, two_state_setup):
        _, _, _, gen = two_state_setup
        for x in np.linspace(-3.0, 4.0, 15):
            value, lam = rate_function(gen, float(x))
            assert abs(cumulant_prime(gen, lam) - x) <= 1e-10 * (1.0 + abs(x))
            assert value >= -1e-12

    def test_dual_point_increasing(self, two_state_setup):
        _, _, _, gen = two_state_setup
        xs = np.linspace(-2.0, 3.0, 21)
        lams = [rate_function(gen, float(x))[1] for x in xs]
        assert (np.diff(lams) > 0).all()

    @settings(max_examples=40, deadline=None)
    @given(x=st.floats(-5.0, 5.0), lam=st.floats(-2.0, 2.0))
    def test_fenchel_young(self, two_state_setup, x, lam):
        _, _, _, gen = two_state_setup
        value, _ = rate_function(gen, x)
        assert value >= lam * x - cumulant(gen, lam) - 1e-9

    def test_table(self, two_state_setup):
        _, _, _, gen = two_state_setup
        table = RateFunction(gen).table([0.0, 0.5, 1.0])
        assert table.shape == (3, 3)
        assert table[1, 1] == pytest.approx(0.0, abs=1e-12)
        assert (np.diff(table[:, 2]) > 0).all()

    def test_convex_on_grid(self, two_state_setup):
        _, _, _, gen = two_state_setup
        xs = np.linspace(-2.0, 3.0, 101)
        values = RateFunction(gen).table(xs)[:, 1]
        assert np.diff(values, 2).min() >= -1e-9


class TestDuality:
    def test_roundtrip_at_single_lambda(self, two_state_setup):
        _, _, _, gen = two_state_setup
        grid = np.linspace(cumulant_prime(gen, -1.0), cumulant_prime(gen, 1.0), 400)
        got = grid_legendre(gen, 0.7, grid)
        assert got == pytest.approx(cumulant(gen, 0.7), abs=1e-6)

    def test_roundtrip_across_lambda_band(self, two_state_setup):
        _, _, _, gen = two_state_setup
        grid = np.linspace(cumulant_prime(gen, -1.0), cumulant_prime(gen, 1.0), 400)
        for lam in np.linspace(-1.0, 1.0, 9):
            got = grid_legendre(gen, float(lam), grid)
            assert got == pytest.approx(cumulant(gen, float(lam)), abs=1e-6)


class TestTilt:
    def test_identity_at_zero(self, two_state_setup):
        _, _, _, gen = two_state_setup
        t = tilt(gen, 0.0)
        assert t.drift == gen.drift and t.sigma2 == gen.sigma2
        np.testing.assert_array_equal(t.jump_intensities, gen.jump_intensities)
        assert t.mean == pytest.approx(gen.a_tilde, abs=1e-14)

    def test_two_state_at_one(self, two_state_setup):
        _, _, _, gen = two_state_setup
        t = tilt(gen, 1.0)
        assert t.drift == pytest.approx(0.5 + 3.8, abs=1e-14)
        # sizes sorted (-1, 1): intensities (0.1/e, 0.1 e)
        np.testing.assert_allclose(
            t.jump_intensities, [0.1 * np.exp(-1.0), 0.1 * np.e], rtol=1e-14
        )
        assert t.mean == pytest.approx(4.3 + 0.1 * np.e - 0.1 / np.e, abs=1e-12)

    def test_mean_identity_on_grid(self, two_state_setup):
        _, _, _, gen = two_state_setup
        for lam in np.arange(-2.0, 2.0 + 1e-12, 0.1):
            t = tilt(gen, float(lam))
            assert abs(t.mean - cumulant_prime(gen, float(lam))) <= 1e-12 * max(
                1.0, abs(t.mean)
            )


class TestImportanceSampling:
    def test_tail_estimate_matches_direct_and_rate(self, two_state_setup):
        # P(xi(t) >= x t) by tilting at lambda*(x): agrees with direct Monte
        # Carlo at moderate t, and -(1/t) ln P approaches I(x) as t grows
        _, _, _, gen = two_state_setup
        x = 1.5
        rate, lam_star = rate_function(gen, x)
        tilted = tilt(gen, lam_star)

        def is_estimate(t, paths, seed):
            cfg = SimConfig(scales=ScalePair.equal(1.0), horizon=t, paths=paths, seed=seed)
            xi = simulate_limit(tilted, cfg)
            logw = -lam_star * xi + t * cumulant(gen, lam_star)
            w = np.exp(logw) * (xi >= x * t)
            return w.mean(), w.std(ddof=1) / np.sqrt(paths)

        def direct_estimate(t, paths, seed):
            cfg = SimConfig(scales=ScalePair.equal(1.0), horizon=t, paths=paths, seed=seed)
            xi = simulate_limit(gen, cfg)
            ind = (xi >= x * t).astype(float)
            return ind.mean(), ind.std(ddof=1) / np.sqrt(paths)

        p_is, se_is = is_estimate(5.0, 20_000, 900)
        p_mc, se_mc = direct_estimate(5.0, 50_000, 901)
        assert abs(p_is - p_mc) < 4.0 * np.hypot(se_is, se_mc)

        devs = []
        for t, seed in ((5.0, 910), (10.0, 911), (20.0, 912)):
            p, se = is_estimate(t, 20_000, seed)
            assert p > 0 and se / p < 0.05
            devs.append(abs(-np.log(p) / t - rate))
        assert devs[2] < devs[0]
        assert devs[2] < 0.1
