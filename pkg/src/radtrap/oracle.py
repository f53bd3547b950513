"""Monte-Carlo check that the stochastic Bloch equations with a broad-band
pump reduce to the population rate equations.

The pump amplitude is realized as a complex Ornstein-Uhlenbeck process of
correlation rate B; the delta-correlated limit is approached as B grows,
with the residual discrepancy of order gamma/B.  The collective rate is
held at a caller-supplied constant (default 0, optically thin): the
reduction being tested does not involve the trapping coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, kernels
from .model import PopulationState, SystemParams


@dataclass(frozen=True)
class StochasticConfig:
    """Ensemble configuration.

    ``pump_rate`` duplicates the system parameter for visibility in run
    manifests; when given, it must match.  ``gamma_ac`` defaults to
    (gamma + gamma' + Gamma)/2 + gamma0/2; the reduction is insensitive to
    it (and to ``delta_ac``) in the broad-band limit, which is exactly why
    both are configurable.
    """

    bandwidth: float
    n_trajectories: int = 10_000
    dt: float | None = None
    seed: int = 0
    delta_ac: float = 0.0
    gamma_ac: float | None = None
    pump_rate: float | None = None

    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else 0.1 / self.bandwidth

    def validate(self, params: SystemParams, gamma_fixed: float) -> None:
        R = params.pump_rate
        if self.pump_rate is not None and self.pump_rate != R:
            raise ValueError(
                f"config pump_rate {self.pump_rate} != params.pump_rate {R}")
        floor = 10.0 * max(params.gamma, params.gamma_prime, R, gamma_fixed)
        if self.bandwidth < floor:
            raise ValueError(
                f"bandwidth {self.bandwidth} must be >= 10*max rate = {floor}")
        if self.resolved_dt() > 0.1 / self.bandwidth + 1e-15:
            raise ValueError("dt must be <= 0.1/bandwidth")
        if self.n_trajectories < 100:
            raise ValueError("need at least 100 trajectories")


@dataclass(frozen=True)
class StochasticResult:
    times: np.ndarray
    mean: np.ndarray      # (n, 3) ensemble-mean populations
    stderr: np.ndarray    # (n, 3) standard error of the mean
    n_trajectories: int
    dt: float
    bandwidth: float
    omega_samples: np.ndarray  # (n_store, n_steps+1) complex amplitude history

    def integrated_autocorrelation(self) -> float:
        """Empirical integral of the amplitude autocorrelation.

        Should recover the pump rate R.  Lags are truncated at 12
        correlation times, where the OU correlation is numerically dead.
        """
        om = self.omega_samples
        if om.size == 0:
            raise ValueError("no stored noise samples")
        n_lags = min(om.shape[1] - 1,
                     max(1, int(round(12.0 / (self.bandwidth * self.dt)))))
        # c_l averaged over trajectories and time origins
        total = float(np.mean(np.abs(om) ** 2))
        for lag in range(1, n_lags + 1):
            c = np.mean(np.conj(om[:, :-lag]) * om[:, lag:])
            total += 2.0 * c.real
        return total * self.dt

    def mean_amplitude(self) -> complex:
        """Ensemble/time mean of the stored pump amplitude."""
        if self.omega_samples.size == 0:
            raise ValueError("no stored noise samples")
        return complex(np.mean(self.omega_samples))


def _ou_ensemble_numpy(n_traj, n_steps, stride, dt, B, R, gp, g0, G, dac, gac,
                       aa0, cc0, seed, n_store):
    """Vectorized fallback path: all trajectories advance together."""
    rng = np.random.default_rng(seed)
    n_out = n_steps // stride + 1
    out = np.zeros((n_traj, n_out, 3))
    omega_store = np.zeros((n_store, n_steps + 1), dtype=np.complex128)

    sig_st = math.sqrt(R * B / 4.0) if R > 0 else 0.0
    decay = math.exp(-B * dt)
    exc = sig_st * math.sqrt(1.0 - decay * decay)
    lam = complex(gac, dac)
    e_half = np.exp(-lam * dt / 2.0)

    ox = sig_st * rng.standard_normal(n_traj)
    oy = sig_st * rng.standard_normal(n_traj)
    aa = np.full(n_traj, aa0)
    cc = np.full(n_traj, cc0)
    # coherence starts at its stationary filtered response (see the
    # compiled kernel for the rationale)
    rac = 1j * (ox + 1j * oy) * (aa - cc) / (lam + B)
    out[:, 0, 0] = aa
    out[:, 0, 1] = 1.0 - aa - cc
    out[:, 0, 2] = cc
    omega_store[:, 0] = ox[:n_store] + 1j * oy[:n_store]

    loss = 1.0 + gp + G
    for step in range(n_steps):
        ox = ox * decay + exc * rng.standard_normal(n_traj)
        oy = oy * decay + exc * rng.standard_normal(n_traj)
        om = ox + 1j * oy
        if n_store:
            omega_store[:, step + 1] = om[:n_store]

        ss = 1j * om * (aa - cc) / lam
        rac = ss + (rac - ss) * e_half

        S = -2.0 * (np.conj(om) * rac).imag
        k1a = -loss * aa + G * (1.0 - aa - cc) + S
        k1c = gp * aa + g0 * (1.0 - aa - 2.0 * cc) - S
        ta, tc = aa + 0.5 * dt * k1a, cc + 0.5 * dt * k1c
        k2a = -loss * ta + G * (1.0 - ta - tc) + S
        k2c = gp * ta + g0 * (1.0 - ta - 2.0 * tc) - S
        ta, tc = aa + 0.5 * dt * k2a, cc + 0.5 * dt * k2c
        k3a = -loss * ta + G * (1.0 - ta - tc) + S
        k3c = gp * ta + g0 * (1.0 - ta - 2.0 * tc) - S
        ta, tc = aa + dt * k3a, cc + dt * k3c
        k4a = -loss * ta + G * (1.0 - ta - tc) + S
        k4c = gp * ta + g0 * (1.0 - ta - 2.0 * tc) - S
        aa = aa + dt * (k1a + 2 * k2a + 2 * k3a + k4a) / 6.0
        cc = cc + dt * (k1c + 2 * k2c + 2 * k3c + k4c) / 6.0

        ss = 1j * om * (aa - cc) / lam
        rac = ss + (rac - ss) * e_half

        if (step + 1) % stride == 0:
            j = (step + 1) // stride
            out[:, j, 0] = aa
            out[:, j, 1] = 1.0 - aa - cc
            out[:, j, 2] = cc
    return out, omega_store


def simulate_stochastic(params: SystemParams, cfg: StochasticConfig,
                        initial: PopulationState, t_end: float,
                        gamma_fixed: float = 0.0, n_out: int = 101,
                        n_store: int = 100) -> StochasticResult:
    """Ensemble average of the stochastic Bloch dynamics.

    Returns mean populations with standard errors on ``n_out`` output
    samples, plus the stored amplitude history of the first ``n_store``
    trajectories for noise diagnostics.
    """
    cfg.validate(params, gamma_fixed)
    if t_end <= 0:
        raise ValueError("t_end must be > 0")
    dt = cfg.resolved_dt()
    n_steps = max(1, int(math.ceil(t_end / dt)))
    stride = max(1, n_steps // max(1, n_out - 1))
    n_steps = stride * int(math.ceil(n_steps / stride))
    n_store = min(n_store, cfg.n_trajectories)

    gac = cfg.gamma_ac
    if gac is None:
        gac = 0.5 * (params.gamma + params.gamma_prime + gamma_fixed) + 0.5 * params.gamma0

    args = (cfg.n_trajectories, n_steps, stride, dt, cfg.bandwidth,
            params.pump_rate, params.gamma_prime, params.gamma0, gamma_fixed,
            cfg.delta_ac, gac, initial.rho_aa, initial.rho_cc, cfg.seed,
            n_store)
    if backend.NUMBA_ENABLED:
        out, omega_store = kernels.ou_ensemble(*args)
    else:
        out, omega_store = _ou_ensemble_numpy(*args)

    times = np.arange(out.shape[1]) * (stride * dt)
    mean = out.mean(axis=0)
    stderr = out.std(axis=0, ddof=1) / math.sqrt(cfg.n_trajectories)
    return StochasticResult(times, mean, stderr, cfg.n_trajectories, dt,
                            cfg.bandwidth, omega_store)
