"""Domain types and the right-hand side of the population rate equations.

All rates are dimensionless ratios to the spontaneous decay rate gamma of
the a->b transition, which is fixed to 1.  Times are in units of 1/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

#: Spontaneous a->b decay rate; the normalization unit for every other rate.
GAMMA = 1.0

#: Tolerance on the population invariants (bounds and trace).
TRACE_TOL = 1e-9


def _check_rate(name: str, value: float) -> None:
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class Inhomogeneous:
    """Doppler-dominated broadening.

    ``doppler_width`` is the Gaussian width of the velocity distribution in
    units of gamma (the formulas assume it is much larger than 1).
    ``density_param`` is the dimensionless density parameter K combining
    atom density, wavelength squared and the effective escape distance for
    a single velocity class.
    """

    doppler_width: float
    density_param: float

    def __post_init__(self):
        if not math.isfinite(self.doppler_width) or self.doppler_width <= 0:
            raise ValueError(f"doppler_width must be > 0, got {self.doppler_width!r}")
        _check_rate("density_param", self.density_param)


@dataclass(frozen=True)
class Radiative:
    """Purely radiative broadening with density parameter K0."""

    density_param_k0: float

    def __post_init__(self):
        _check_rate("density_param_k0", self.density_param_k0)


Regime = Union[Inhomogeneous, Radiative]


def density_param_inhom(n_lambda2_deff: float, doppler_width: float) -> float:
    """Convenience: K from the raw density combination N*lambda^2*d_eff."""
    if doppler_width <= 0:
        raise ValueError("doppler_width must be > 0")
    return n_lambda2_deff * GAMMA / (math.sqrt(2.0 * math.pi) * doppler_width)


def density_param_rad(n_lambda2_deff: float) -> float:
    """Convenience: K0 from the raw density combination N*lambda^2*d_eff."""
    return n_lambda2_deff / (2.0 * math.pi)


@dataclass(frozen=True)
class SystemParams:
    """All rates of the pumped three-level system, in units of gamma."""

    gamma_prime: float
    gamma0: float
    pump_rate: float
    regime: Regime
    gamma: float = GAMMA

    def __post_init__(self):
        if self.gamma != GAMMA:
            raise ValueError("gamma is the unit of all rates and must be exactly 1")
        _check_rate("gamma_prime", self.gamma_prime)
        _check_rate("gamma0", self.gamma0)
        _check_rate("pump_rate", self.pump_rate)

    @property
    def density_param(self) -> float:
        """The density parameter of whichever regime is active."""
        if isinstance(self.regime, Inhomogeneous):
            return self.regime.density_param
        return self.regime.density_param_k0


@dataclass(frozen=True)
class PopulationState:
    """Occupation probabilities of the three levels; trace-1 by invariant."""

    rho_aa: float
    rho_bb: float
    rho_cc: float

    def __post_init__(self):
        for name, v in (("rho_aa", self.rho_aa), ("rho_bb", self.rho_bb),
                        ("rho_cc", self.rho_cc)):
            if not (-TRACE_TOL <= v <= 1.0 + TRACE_TOL):
                raise ValueError(f"{name} = {v!r} outside [0, 1]")
        trace = self.rho_aa + self.rho_bb + self.rho_cc
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"populations sum to {trace!r}, expected 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.rho_aa, self.rho_bb, self.rho_cc)


def gamma_ab(params: SystemParams) -> float:
    """Coherence decay rate of the a-b transition: (gamma+gamma'+R+gamma0)/2."""
    return 0.5 * (params.gamma + params.gamma_prime + params.pump_rate + params.gamma0)


def rate_rhs(state: PopulationState, params: SystemParams,
             Gamma: float) -> tuple[float, float, float]:
    """Time derivatives (d rho_aa, d rho_bb, d rho_cc) of the rate equations.

    ``Gamma`` is the collective decay/repump rate on the a-b transition.
    The three derivatives sum to zero exactly: d rho_bb is computed by
    trace closure.
    """
    if Gamma < 0:
        raise ValueError(f"Gamma must be >= 0, got {Gamma!r}")
    aa, bb, cc = state.rho_aa, state.rho_bb, state.rho_cc
    g, gp, g0, R = params.gamma, params.gamma_prime, params.gamma0, params.pump_rate
    daa = -(g + gp + Gamma) * aa + Gamma * bb - R * (aa - cc)
    dcc = gp * aa + g0 * bb - g0 * cc + R * (aa - cc)
    dbb = -(daa + dcc)
    return (daa, dbb, dcc)
