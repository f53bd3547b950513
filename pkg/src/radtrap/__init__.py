"""Optical pumping in optically thick atomic media with radiation trapping."""

from .backend import NUMBA_ENABLED
from .dynamics import (AsymptoteEstimate, Trajectory, asymptotic_pump_rate_inhom,
                       asymptotic_pump_rate_rad, effective_pump_rate,
                       estimate_asymptote, evolve, pump_rate_estimate)
from .errors import (ConfigError, DegenerateGrid, DomainError, InversionError,
                     NoConvergence, NotConverged, RadtrapError,
                     StepSizeUnderflow)
from .model import (GAMMA, Inhomogeneous, PopulationState, Radiative, Regime,
                    SystemParams, density_param_inhom, density_param_rad,
                    gamma_ab, rate_rhs)
from .oracle import StochasticConfig, StochasticResult, simulate_stochastic
from .steadystate import (StationaryResult, SweepRow, SweepTable, stationary,
                          sweep)
from .trapping import (Spectrum, absorption_spectrum, gamma_avg_inhom,
                       gamma_selfconsistent_rad, gamma_spectral_inhom,
                       gamma_spectral_rad, spectral_distribution)

__version__ = "0.1.0"

__all__ = [
    "AsymptoteEstimate", "ConfigError", "DegenerateGrid", "DomainError",
    "GAMMA", "Inhomogeneous", "InversionError", "NoConvergence",
    "NotConverged", "NUMBA_ENABLED", "PopulationState", "Radiative",
    "RadtrapError", "Regime", "Spectrum", "StationaryResult",
    "StepSizeUnderflow", "StochasticConfig", "StochasticResult", "SweepRow",
    "SweepTable", "SystemParams", "Trajectory", "absorption_spectrum",
    "asymptotic_pump_rate_inhom", "asymptotic_pump_rate_rad",
    "density_param_inhom", "density_param_rad", "effective_pump_rate",
    "estimate_asymptote", "evolve", "gamma_ab", "gamma_avg_inhom",
    "gamma_selfconsistent_rad", "gamma_spectral_inhom", "gamma_spectral_rad",
    "pump_rate_estimate", "rate_rhs", "simulate_stochastic",
    "spectral_distribution", "stationary", "sweep",
]
