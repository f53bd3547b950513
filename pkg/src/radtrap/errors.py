"""Exception types raised by the solvers and the CLI."""


class RadtrapError(Exception):
    """Base class for all radtrap errors."""


class InversionError(RadtrapError):
    """Excited-state population exceeds the target-state population.

    The trapping formulas formally produce a positive rate in this regime,
    but the reabsorption picture behind them no longer applies, so the
    radiative self-consistent solver refuses to run.
    """


class NoConvergence(RadtrapError):
    """An iterative solver exhausted its step budget.

    This signals a bug or a pathological parameter set, not a physical
    condition; the best residual reached is reported in the message.
    """


class StepSizeUnderflow(RadtrapError):
    """The adaptive step controller drove the step below 1e-14/gamma."""


class DegenerateGrid(RadtrapError):
    """A time or detuning grid is too short for the requested operation."""


class DomainError(RadtrapError):
    """An argument is outside the mathematical domain of a closed form."""


class NotConverged(RadtrapError):
    """A trajectory has not reached the asymptotic regime."""


class ConfigError(RadtrapError):
    """A scenario configuration failed to parse or validate."""
