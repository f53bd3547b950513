"""Time integration of the trapping-coupled rate equations and the
effective pump rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, trapping
from .errors import (DegenerateGrid, DomainError, InversionError,
                     NoConvergence, NotConverged, StepSizeUnderflow)
from .model import Inhomogeneous, PopulationState, Radiative, SystemParams, gamma_ab

#: Hard cap on the default integration window, in units of 1/gamma.
T_END_CAP = 1e7

DEFAULT_INITIAL = PopulationState(0.0, 0.5, 0.5)


@dataclass(frozen=True)
class Trajectory:
    """Time grid, population states, collective rate and pump rate series."""

    times: np.ndarray        # strictly increasing, units 1/gamma
    states: np.ndarray       # (n, 3): rho_aa, rho_bb, rho_cc
    gammas: np.ndarray       # collective rate at each sample
    pump_rates: np.ndarray   # effective pump rate at each sample (nan if n < 3)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or not np.all(np.diff(t) > 0):
            raise ValueError("times must be 1-d and strictly increasing")
        if self.states.shape != (t.size, 3):
            raise ValueError("states must have shape (len(times), 3)")
        if self.gammas.shape != (t.size,) or self.pump_rates.shape != (t.size,):
            raise ValueError("gammas/pump_rates must match times in length")

    @property
    def manifold(self) -> np.ndarray:
        """Population remaining in the pumped manifold, rho_aa + rho_cc."""
        return self.states[:, 0] + self.states[:, 2]

    def state_at(self, i: int) -> PopulationState:
        aa, bb, cc = self.states[i]
        return PopulationState(float(aa), float(bb), float(cc))


def asymptotic_pump_rate_inhom(K: float) -> float:
    """Closed-form large-K pump-rate plateau in the Doppler regime."""
    if K <= 1.0:
        raise DomainError(f"K must be > 1 for the asymptotic form, got {K!r}")
    return 1.0 / (2.0 * K * math.sqrt(math.pi * math.log(K)))


def asymptotic_pump_rate_rad(K_tilde: float) -> float:
    """Closed-form pump-rate plateau in the radiative regime."""
    if K_tilde < 0:
        raise DomainError(f"K_tilde must be >= 0, got {K_tilde!r}")
    return 0.5 * math.exp(-K_tilde)


def pump_rate_estimate(params: SystemParams) -> float:
    """Closed-form estimate of the pump-rate plateau, used to size the
    default integration window.  Falls back to gamma/2 where the
    asymptotic forms do not apply."""
    if isinstance(params.regime, Inhomogeneous):
        K = params.regime.density_param
        if K > math.e:
            return asymptotic_pump_rate_inhom(K)
        return 0.5
    K_tilde = params.regime.density_param_k0 / gamma_ab(params)
    return asymptotic_pump_rate_rad(K_tilde)


def evolve(params: SystemParams, initial: PopulationState = DEFAULT_INITIAL,
           t_end: float | None = None, output_grid: np.ndarray | None = None,
           rtol: float = 1e-8, atol: float = 1e-10,
           n_out: int = 400) -> Trajectory:
    """Integrate the rate equations with the state-dependent collective rate.

    Adaptive Dormand-Prince 5(4); the collective rate is re-evaluated at
    every stage (a fixed-point solve per stage in the radiative regime).
    The default window is 50 times the estimated pumping time, capped at
    1e7/gamma.
    """
    if output_grid is not None:
        t_out = np.asarray(output_grid, dtype=float)
        if t_out.ndim != 1 or t_out.size < 2 or not np.all(np.diff(t_out) > 0):
            raise DegenerateGrid("output_grid must be 1-d, increasing, >= 2 points")
    else:
        if t_end is None:
            t_end = min(50.0 / max(pump_rate_estimate(params), 1.0 / T_END_CAP),
                        T_END_CAP)
        if t_end <= 0:
            raise ValueError("t_end must be > 0")
        t_out = np.linspace(0.0, t_end, n_out)

    if isinstance(params.regime, Inhomogeneous):
        regime_code, K = kernels.REGIME_INHOM, params.regime.density_param
    else:
        regime_code, K = kernels.REGIME_RAD, params.regime.density_param_k0

    gh_f, gh_w = trapping.gh_nodes()
    states, gammas, status = kernels.integrate_populations(
        initial.rho_aa, initial.rho_bb, initial.rho_cc,
        params.gamma_prime, params.gamma0, params.pump_rate,
        regime_code, K, gh_f, gh_w, t_out, rtol, atol)

    if status == kernels.STATUS_UNDERFLOW:
        raise StepSizeUnderflow("step size fell below 1e-14/gamma")
    if status == kernels.STATUS_INVERSION:
        raise InversionError("rho_aa exceeded rho_bb during integration")
    if status == kernels.STATUS_NO_CONVERGENCE:
        raise NoConvergence("radiative fixed point failed inside the integrator")

    pump = np.full(t_out.size, np.nan)
    manifold = states[:, 0] + states[:, 2]
    # log-derivative is meaningful only while the manifold stays clear of
    # the absolute-tolerance floor of the integrator
    bad = np.flatnonzero(manifold <= max(1e-300, 10.0 * atol))
    valid = bad[0] if bad.size else t_out.size
    if valid >= 3:
        pump[:valid] = -np.gradient(np.log(manifold[:valid]), t_out[:valid])
    return Trajectory(t_out, states, gammas, pump)


def effective_pump_rate(traj: Trajectory) -> np.ndarray:
    """Instantaneous transfer rate -d/dt ln(rho_aa + rho_cc).

    Centered finite differences on the output grid, one-sided at the ends.
    """
    if traj.times.size < 3:
        raise DegenerateGrid("need at least 3 samples for finite differences")
    m = traj.manifold
    if np.any(m <= 1e-300):
        raise ValueError("manifold population underflowed; shorten the window")
    return -np.gradient(np.log(m), traj.times)


@dataclass(frozen=True)
class AsymptoteEstimate:
    """Pump-rate plateau with a relative-spread quality indicator."""

    rate: float
    spread: float


def estimate_asymptote(traj: Trajectory, max_spread: float = 0.10) -> AsymptoteEstimate:
    """Median pump rate over the final 20% of the time window.

    Requires the pumped manifold to have decayed below 10% of its initial
    value, so the window actually samples the plateau.
    """
    m = traj.manifold
    if m[-1] > 0.1 * m[0]:
        raise NotConverged(
            f"manifold only decayed to {m[-1] / m[0]:.3g} of its initial "
            "value; integrate longer before extracting the plateau")
    rates = effective_pump_rate(traj)
    t0 = traj.times[0] + 0.8 * (traj.times[-1] - traj.times[0])
    window = rates[traj.times >= t0]
    rate = float(np.median(window))
    spread = float((window.max() - window.min()) / abs(rate)) if rate != 0 else math.inf
    if spread > max_spread:
        raise NotConverged(
            f"pump rate spread {spread:.3g} over the final 20% window "
            f"exceeds {max_spread}; plateau not reached")
    return AsymptoteEstimate(rate, spread)
