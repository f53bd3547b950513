"""Stationary solver and sweep tests."""

import math

import numpy as np
import pytest

from radtrap import (Inhomogeneous, PopulationState, Radiative, SystemParams,
                     evolve, rate_rhs, stationary, sweep)


def params_inhom(K, gp=1.0, g0=0.0, R=10.0, dw=100.0):
    return SystemParams(gamma_prime=gp, gamma0=g0, pump_rate=R,
                        regime=Inhomogeneous(doppler_width=dw, density_param=K))


def params_rad(K0, gp=1.0, g0=0.0, R=10.0):
    return SystemParams(gamma_prime=gp, gamma0=g0, pump_rate=R,
                        regime=Radiative(density_param_k0=K0))


def linear_oracle(gp, g0, R):
    """Direct linear solve of the thin-medium (Gamma = 0) stationary system."""
    A = np.array([
        [-(1.0 + gp + R), 0.0, R],
        [gp + R, g0, -g0 - R],
        [1.0, 1.0, 1.0],
    ])
    b = np.array([0.0, 0.0, 1.0])
    return np.linalg.solve(A, b)


class TestStationary:
    @pytest.mark.parametrize("params", [
        params_inhom(0.0), params_inhom(100.0), params_rad(10.0),
    ])
    def test_stable_target_absorbs_everything(self, params):
        res = stationary(params)
        assert res.state.rho_bb == pytest.approx(1.0, abs=1e-12)
        assert res.state.rho_aa == pytest.approx(0.0, abs=1e-12)
        assert res.residual < 1e-12

    def test_linear_oracle_thin_medium(self):
        gp, g0, R = 1.0, 1e-2, 10.0
        res = stationary(params_inhom(0.0, gp=gp, g0=g0, R=R))
        aa, bb, cc = linear_oracle(gp, g0, R)
        assert res.state.rho_aa == pytest.approx(aa, rel=1e-10)
        assert res.state.rho_bb == pytest.approx(bb, rel=1e-10)
        assert res.state.rho_cc == pytest.approx(cc, rel=1e-10)
        assert res.gamma == 0.0

    def test_dense_medium_below_thin(self):
        g0 = 1e-2
        thin = stationary(params_inhom(0.0, g0=g0))
        dense = stationary(params_inhom(1e4, g0=g0))
        assert dense.state.rho_bb < thin.state.rho_bb

    def test_residual_closes_rate_equations(self):
        res = stationary(params_rad(50.0, g0=1e-3))
        d = rate_rhs(res.state, params_rad(50.0, g0=1e-3), res.gamma)
        assert max(abs(x) for x in d) < 1e-10
        assert max(abs(x) for x in d) == pytest.approx(res.residual, abs=1e-12)

    def test_newton_vs_integration_randomized(self):
        rng = np.random.default_rng(99)
        from radtrap import pump_rate_estimate
        for i in range(20):
            gp = rng.uniform(0.2, 2.0)
            g0 = rng.uniform(0.05, 0.3)
            R = rng.uniform(2.0, 10.0)
            K = 10.0 ** rng.uniform(-1.0, 2.5)
            if i % 2 == 0:
                params = params_inhom(K, gp=gp, g0=g0, R=R)
            else:
                params = params_rad(K, gp=gp, g0=g0, R=R)
            res = stationary(params)
            t_end = 1e3 / max(g0, pump_rate_estimate(params))
            traj = evolve(params, t_end=t_end, n_out=50)
            for level in range(3):
                assert abs(traj.states[-1, level]
                           - (res.state.rho_aa, res.state.rho_bb,
                              res.state.rho_cc)[level]) < 1e-6, (i, params)


class TestSweep:
    def test_gamma0_zero_series(self):
        table = sweep(params_inhom(1.0), [1.0, 10.0, 100.0], [0.0])
        assert all(r.state.rho_bb == pytest.approx(1.0, abs=1e-12)
                   for r in table.rows)

    def test_single_point_matches_stationary(self):
        params = params_rad(25.0, g0=1e-3)
        table = sweep(params, [25.0], [1e-3])
        direct = stationary(params)
        row = table.rows[0]
        assert row.state.rho_bb == pytest.approx(direct.state.rho_bb, rel=1e-10)
        assert row.gamma_stat == pytest.approx(direct.gamma, rel=1e-9, abs=1e-12)

    def test_series_ordering_radiative(self):
        K_grid = np.logspace(0, 6, 13)
        gamma0s = [1e-4, 1e-3, 1e-2]
        table = sweep(params_rad(1.0), K_grid, gamma0s)
        series = {g0: [r.state.rho_bb for r in table.series(g0)]
                  for g0 in gamma0s}
        for g0, bbs in series.items():
            assert all(b - 1e-12 <= a for a, b in zip(bbs, bbs[1:])), g0
        for g_small, g_big in zip(gamma0s, gamma0s[1:]):
            low = np.array(series[g_big])
            high = np.array(series[g_small])
            assert np.all(low <= high + 1e-12)

    def test_residuals_small(self):
        table = sweep(params_inhom(1.0, g0=1e-3), np.logspace(0, 4, 9), [1e-3])
        assert all(r.residual < 1e-10 for r in table.rows)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            sweep(params_inhom(1.0), [], [0.0])
        with pytest.raises(ValueError):
            sweep(params_inhom(1.0), [1.0], [])

    def test_failures_recorded_not_raised(self):
        # an inverted seed cannot break the sweep; rows simply report errors
        table = sweep(params_rad(1.0, g0=1e-3), [1.0, 10.0], [1e-3])
        assert all(r.error is None for r in table.rows)
