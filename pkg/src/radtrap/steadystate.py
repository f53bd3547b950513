"""Stationary solutions and density-parameter sweeps."""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels, trapping
from .errors import InversionError, NoConvergence
from .model import Inhomogeneous, PopulationState, Radiative, SystemParams, gamma_ab

_NEWTON_MAX_STEPS = 500
_RESTARTS = 10


def _regime_code_and_k(params: SystemParams) -> tuple[int, float]:
    if isinstance(params.regime, Inhomogeneous):
        return kernels.REGIME_INHOM, params.regime.density_param
    return kernels.REGIME_RAD, params.regime.density_param_k0


@dataclass(frozen=True)
class StationaryResult:
    state: PopulationState
    gamma: float        # self-consistent collective rate at stationarity
    residual: float     # max |rho-dot| when fed back through the rate equations


class _Problem:
    """Reduced 2-variable stationarity residual F(aa, cc) with bb by closure."""

    def __init__(self, params: SystemParams):
        self.gp = params.gamma_prime
        self.g0 = params.gamma0
        self.R = params.pump_rate
        self.gab = gamma_ab(params)
        self.regime, self.K = _regime_code_and_k(params)
        self.gh_f, self.gh_w = trapping.gh_nodes()
        self.radiative = self.regime == kernels.REGIME_RAD

    def gamma_of(self, aa: float, cc: float) -> float:
        bb = 1.0 - aa - cc
        g, status = kernels.collective_rate(
            aa, bb, self.regime, self.K, self.gab, self.gh_f, self.gh_w)
        if status == kernels.STATUS_INVERSION:
            raise InversionError("rho_aa > rho_bb inside the stationary solve")
        if status == kernels.STATUS_NO_CONVERGENCE:
            raise NoConvergence("radiative fixed point failed inside the stationary solve")
        return g

    def residual(self, aa: float, cc: float, G: float) -> tuple[float, float]:
        bb = 1.0 - aa - cc
        daa = -(1.0 + self.gp + G) * aa + G * bb - self.R * (aa - cc)
        dcc = self.gp * aa + self.g0 * bb - self.g0 * cc + self.R * (aa - cc)
        return daa, dcc

    def F(self, aa: float, cc: float) -> tuple[float, float]:
        return self.residual(aa, cc, self.gamma_of(aa, cc))

    def jacobian(self, aa: float, cc: float) -> np.ndarray:
        """Analytic rate-equation Jacobian plus a finite-difference term for
        the state dependence of the collective rate."""
        G = self.gamma_of(aa, cc)
        J = np.array([
            [-(1.0 + self.gp + G) - G - self.R, -G + self.R],
            [self.gp - self.g0 + self.R, -2.0 * self.g0 - self.R],
        ])
        bb = 1.0 - aa - cc
        eps = 1e-7
        dG_daa = (self.gamma_of(self._clip_aa(aa + eps, cc), cc)
                  - self.gamma_of(self._clip_aa(aa - eps, cc), cc)) / (2 * eps)
        dG_dcc = (self.gamma_of(aa, cc + eps) - self.gamma_of(aa, max(cc - eps, 0.0))) \
            / (2 * eps) if cc >= eps else \
            (self.gamma_of(aa, cc + eps) - self.gamma_of(aa, cc)) / eps
        # dF/dG = (bb - aa, 0)
        J[0, 0] += (bb - aa) * dG_daa
        J[0, 1] += (bb - aa) * dG_dcc
        return J

    def _clip_aa(self, aa: float, cc: float) -> float:
        aa = max(aa, 0.0)
        if self.radiative:
            # keep bb >= aa so the fixed point stays defined
            aa = min(aa, 0.5 * (1.0 - cc) * (1.0 - 1e-12))
        return min(aa, 1.0 - cc)

    def project(self, aa: float, cc: float) -> tuple[float, float]:
        cc = min(max(cc, 0.0), 1.0)
        aa = self._clip_aa(aa, cc)
        return aa, cc

    def thin_medium_seed(self) -> tuple[float, float]:
        """Stationary solution of the optically thin (Gamma = 0) system."""
        A = np.array([
            [-(1.0 + self.gp + self.R), self.R],
            [self.gp - self.g0 + self.R, -2.0 * self.g0 - self.R],
        ])
        b = np.array([0.0, -self.g0])
        try:
            aa, cc = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            aa, cc = 0.0, 0.0
        return self.project(float(aa), float(cc))


def stationary(params: SystemParams,
               seed_state: PopulationState | None = None) -> StationaryResult:
    """Solve the stationarity conditions by damped Newton iteration.

    The two independent populations are iterated with the collective rate
    re-solved at every evaluation; up to 10 random restarts if the damped
    iteration stalls.
    """
    prob = _Problem(params)
    if seed_state is not None:
        seeds = [(seed_state.rho_aa, seed_state.rho_cc)]
    else:
        seeds = [prob.thin_medium_seed()]
    rng = np.random.default_rng(0)
    for _ in range(_RESTARTS):
        u = rng.random(2)
        aa = 0.5 * u[0]
        cc = (1.0 - aa) * u[1]
        seeds.append(prob.project(aa, cc))

    best: tuple[float, float, float] | None = None  # (residual, aa, cc)
    steps_left = _NEWTON_MAX_STEPS
    for aa, cc in seeds:
        aa, cc = prob.project(aa, cc)
        while steps_left > 0:
            steps_left -= 1
            fa, fc = prob.F(aa, cc)
            fnorm = max(abs(fa), abs(fc))
            if best is None or fnorm < best[0]:
                best = (fnorm, aa, cc)
            if fnorm < 1e-13:
                return _finish(prob, aa, cc)
            try:
                step = np.linalg.solve(prob.jacobian(aa, cc), -np.array([fa, fc]))
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            improved = False
            while lam > 1e-8:
                na, nc = prob.project(aa + lam * step[0], cc + lam * step[1])
                ga, gc = prob.F(na, nc)
                if max(abs(ga), abs(gc)) < fnorm * (1.0 - 0.25 * lam) or \
                        max(abs(ga), abs(gc)) < 1e-13:
                    aa, cc = na, nc
                    improved = True
                    break
                lam *= 0.5
            if not improved:
                break
        else:
            break
    assert best is not None
    if best[0] < 1e-13:
        return _finish(prob, best[1], best[2])
    raise NoConvergence(
        f"stationary solve stalled; best residual {best[0]:.3e} at "
        f"rho_aa={best[1]:.6g}, rho_cc={best[2]:.6g}")


def _finish(prob: _Problem, aa: float, cc: float) -> StationaryResult:
    G = prob.gamma_of(aa, cc)
    fa, fc = prob.residual(aa, cc, G)
    res = max(abs(fa), abs(fc), abs(fa + fc))
    state = PopulationState(aa, 1.0 - aa - cc, cc)
    return StationaryResult(state, G, res)


@dataclass(frozen=True)
class SweepRow:
    density_param: float
    gamma0: float
    state: PopulationState | None
    gamma_stat: float
    residual: float
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    def series(self, gamma0: float) -> list[SweepRow]:
        return [r for r in self.rows if r.gamma0 == gamma0]


def _with(params: SystemParams, K: float, gamma0: float) -> SystemParams:
    if isinstance(params.regime, Inhomogeneous):
        regime = dataclasses.replace(params.regime, density_param=K)
    else:
        regime = dataclasses.replace(params.regime, density_param_k0=K)
    return dataclasses.replace(params, regime=regime, gamma0=gamma0)


def _run_series(params_base: SystemParams, K_grid, gamma0: float) -> list[SweepRow]:
    rows = []
    seed = None
    for K in K_grid:
        params = _with(params_base, K, gamma0)
        try:
            result = stationary(params, seed_state=seed)
            seed = result.state  # continuation along K
            rows.append(SweepRow(K, gamma0, result.state, result.gamma,
                                 result.residual))
        except Exception as exc:  # record and continue with the sweep
            rows.append(SweepRow(K, gamma0, None, math.nan, math.inf, str(exc)))
            seed = None
    return rows


def sweep(params_base: SystemParams, K_grid, gamma0_list) -> SweepTable:
    """One stationary solve per (K, gamma0) pair.

    Within a gamma0 series the previous solution seeds the next Newton
    iteration (continuation along K); series run concurrently up to
    ``RADTRAP_THREADS`` workers.  Failed rows are recorded, not raised.
    """
    K_grid = list(K_grid)
    gamma0_list = list(gamma0_list)
    if not K_grid or not gamma0_list:
        raise ValueError("K_grid and gamma0_list must be non-empty")
    if any(K < 0 for K in K_grid):
        raise ValueError("K values must be >= 0")
    workers = int(os.environ.get("RADTRAP_THREADS", "0")) or None
    if len(gamma0_list) == 1:
        series = [_run_series(params_base, K_grid, gamma0_list[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            series = list(pool.map(
                lambda g0: _run_series(params_base, K_grid, g0), gamma0_list))
    rows: list[SweepRow] = []
    for s in series:
        rows.extend(s)
    return SweepTable(tuple(rows))
