"""Exception types shared across the toolkit."""

from __future__ import annotations


class WindfarmError(Exception):
    """Base class for all toolkit errors."""


class InvalidAngleError(WindfarmError, ValueError):
    """Angle input is non-finite or otherwise unusable."""


class InvalidInputError(WindfarmError, ValueError):
    """Generic precondition violation on a numeric input."""


class DegenerateLegError(WindfarmError):
    """Flight leg between coincident points."""


class LegInfeasibleError(WindfarmError):
    """The wind defeats the UAV on this leg (no positive ground speed)."""


class PlanningAbortedError(WindfarmError):
    """Wind exceeds the UAV's rated resistance; no plan is attempted."""


class UnreachableTurbineError(WindfarmError):
    """Some turbines lie outside every UAV's effective range."""

    def __init__(self, turbine_ids):
        self.turbine_ids = sorted(turbine_ids)
        super().__init__(f"turbines unreachable by any UAV: {', '.join(self.turbine_ids)}")


class InfeasibleTourError(WindfarmError):
    """No Hamiltonian cycle exists over the feasible edges."""


class InfeasibleTurbineError(WindfarmError):
    """A single out-and-back visit already exceeds the flight-time budget."""


class QuantizationDegenerateError(WindfarmError):
    """Matrix cannot be quantized (median absolute weight is zero)."""


class ModelError(WindfarmError):
    """Inconsistent model shapes or non-finite parameters."""


class TrainingError(WindfarmError):
    """Training failed (empty dataset or diverging loss)."""


class ParseError(WindfarmError):
    """Malformed input data file; carries the offending row when known."""

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


class SeriesError(WindfarmError):
    """Series violates a structural requirement (length, spacing, gaps)."""


class ConfigError(WindfarmError):
    """Run configuration is missing or invalid."""
