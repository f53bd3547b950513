"""Collective decay/repump rate from the instantaneous populations.

Doppler regime: explicit spectral rate and its Gauss-Hermite velocity
average.  Radiative regime: the rate is defined only implicitly and is
solved as a fixed point at line center.  Spectral distributions and the
absorption profile live here as well.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InversionError, NoConvergence
from .model import (Inhomogeneous, PopulationState, Radiative, SystemParams,
                    gamma_ab)

#: Gauss-Hermite order for the velocity average.  The 64-node rule named in
#: the original write-up plateaus near 2e-6 relative error for density
#: parameters around 1e4; 256 nodes reach the 1e-9 bar against adaptive
#: quadrature.
GH_ORDER = 256


def _folded_hermgauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Positive-half Gauss-Hermite rule with doubled weights.

    The integrand only depends on y^2, so the symmetric rule folds to
    half the nodes.  Returns (exp(-y^2) at nodes, weights); the weights
    sum to sqrt(pi).
    """
    y, w = np.polynomial.hermite.hermgauss(order)
    pos = y > 0
    return np.exp(-y[pos] ** 2), 2.0 * w[pos]


_GH_F, _GH_W = _folded_hermgauss(GH_ORDER)


def gh_nodes() -> tuple[np.ndarray, np.ndarray]:
    """The folded quadrature rule used by every velocity average."""
    return _GH_F, _GH_W


def _warn_if_inverted(state: PopulationState) -> None:
    if state.rho_aa > state.rho_bb + 1e-9:
        warnings.warn(
            "rho_aa > rho_bb: the medium amplifies instead of trapping; "
            "the returned rate is a formal evaluation only",
            stacklevel=3,
        )


def gamma_spectral_inhom(state: PopulationState, K: float,
                         delta_over_dw: float) -> float:
    """Doppler-regime trapping rate at detuning delta/Delta_D."""
    if K < 0:
        raise ValueError("K must be >= 0")
    _warn_if_inverted(state)
    return kernels.gamma_spectral_inhom_kernel(
        state.rho_aa, state.rho_bb, K, delta_over_dw)


def gamma_avg_inhom(state: PopulationState, K: float) -> float:
    """Velocity-averaged Doppler-regime trapping rate."""
    if K < 0:
        raise ValueError("K must be >= 0")
    _warn_if_inverted(state)
    return kernels.gamma_avg_inhom_kernel(
        state.rho_aa, state.rho_bb, K, _GH_F, _GH_W)


def gamma_selfconsistent_rad(state: PopulationState, params: SystemParams,
                             K0: float) -> float:
    """Line-center collective rate in the radiative regime.

    Solves Gamma = rhs(Gamma); the rhs is non-increasing in Gamma so the
    non-negative fixed point is unique.
    """
    if K0 < 0:
        raise ValueError("K0 must be >= 0")
    gab = gamma_ab(params)
    g, status, it = kernels.rad_fixed_point(
        state.rho_aa, state.rho_bb, K0, gab)
    if status == kernels.STATUS_INVERSION:
        raise InversionError(
            f"rho_aa={state.rho_aa} > rho_bb={state.rho_bb}: amplifying "
            "medium, outside the validity of the trapping fixed point")
    if status == kernels.STATUS_NO_CONVERGENCE:
        raise NoConvergence(f"fixed point not converged after {it} steps")
    return g


def gamma_spectral_rad(state: PopulationState, params: SystemParams,
                       K0: float, gamma_star: float, delta: float) -> float:
    """Radiative-regime spectral rate at detuning delta (units of gamma).

    ``gamma_star`` must be the line-center fixed point for this state; at
    delta = 0 the fixed point is reproduced.
    """
    return kernels.rad_spectral_kernel(
        state.rho_aa, state.rho_bb, K0, gamma_ab(params), gamma_star, delta)


@dataclass(frozen=True)
class Spectrum:
    """Sampled spectral density over a strictly increasing detuning grid.

    Detunings are in units of gamma, except in the Doppler regime where
    they are in units of the Doppler width.
    """

    detunings: np.ndarray
    values: np.ndarray
    normalization: str  # "peak" | "area" | "none"

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if d.ndim != 1 or d.size != v.size:
            raise ValueError("detunings and values must be 1-d and equal length")
        if not np.all(np.diff(d) > 0):
            raise ValueError("detunings must be strictly increasing")
        if np.any(v < -1e-15):
            raise ValueError("spectral values must be >= 0")
        if self.normalization == "peak" and v.size and v.max() > 1.0 + 1e-12:
            raise ValueError("peak-normalized values must not exceed 1")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "values", np.maximum(v, 0.0))

    def fwhm(self) -> float:
        """Full width at half maximum, linearly interpolated on the grid."""
        v = self.values
        d = self.detunings
        peak = v.max()
        half = 0.5 * peak
        above = np.flatnonzero(v >= half)
        if above.size == 0:
            return 0.0
        i0, i1 = above[0], above[-1]
        left = d[i0]
        if i0 > 0:
            left = d[i0 - 1] + (d[i0] - d[i0 - 1]) * (half - v[i0 - 1]) / (v[i0] - v[i0 - 1])
        right = d[i1]
        if i1 < v.size - 1:
            right = d[i1] + (d[i1 + 1] - d[i1]) * (half - v[i1]) / (v[i1 + 1] - v[i1])
        return right - left


def absorption_spectrum(state: PopulationState, params: SystemParams,
                        gamma_star: float, deltas: np.ndarray) -> Spectrum:
    """Peak-normalized atomic response profile.

    A Lorentzian of half-width Gamma_ab = gamma_ab + Gamma; the population
    prefactor of the response function cancels under peak normalization.
    """
    deltas = np.asarray(deltas, dtype=float)
    big_gab = gamma_ab(params) + gamma_star
    values = big_gab ** 2 / (big_gab ** 2 + deltas ** 2)
    return Spectrum(deltas, values, "peak")


def spectral_distribution(state: PopulationState, params: SystemParams,
                          deltas: np.ndarray,
                          normalization: str = "peak") -> Spectrum:
    """Normalized spectral distribution of the trapped radiation.

    The caller is responsible for passing a stationary state.  With
    ``normalization="peak"`` the samples are divided by the line-center
    value; ``"area"`` divides by the trapezoidal integral instead.
    """
    deltas = np.asarray(deltas, dtype=float)
    aa, bb = state.rho_aa, state.rho_bb
    if isinstance(params.regime, Inhomogeneous):
        K = params.regime.density_param
        raw = np.array([kernels.gamma_spectral_inhom_kernel(aa, bb, K, d)
                        for d in deltas])
        center = kernels.gamma_spectral_inhom_kernel(aa, bb, K, 0.0)
    elif isinstance(params.regime, Radiative):
        K0 = params.regime.density_param_k0
        g_star = gamma_selfconsistent_rad(state, params, K0)
        gab = gamma_ab(params)
        raw = np.array([kernels.rad_spectral_kernel(aa, bb, K0, gab, g_star, d)
                        for d in deltas])
        center = g_star if g_star > 0 else kernels.rad_spectral_kernel(
            aa, bb, K0, gab, g_star, 0.0)
    else:
        raise TypeError(f"unknown regime {params.regime!r}")

    if normalization == "peak":
        denom = center
    elif normalization == "area":
        trapezoid = getattr(np, "trapezoid", np.trapz)
        denom = trapezoid(raw, deltas)
    else:
        raise ValueError("normalization must be 'peak' or 'area'")
    if denom <= 0:
        # no excited population: the distribution is identically zero
        return Spectrum(deltas, np.zeros_like(deltas), "none")
    return Spectrum(deltas, raw / denom,
                    "peak" if normalization == "peak" else "none")
