"""Exception types shared across the package.

ConfigError maps to CLI exit code 1, SimulationError and its subclasses to
exit code 2.
"""

__all__ = [
    "ConfigError",
    "DimensionError",
    "SimulationError",
    "DegenerateSteadyStateError",
    "ConvergenceError",
    "PositivityError",
    "FitError",
    "PeakAssignmentError",
    "UnresolvedSplittingError",
    "SweepFailureError",
]


class ConfigError(ValueError):
    """Invalid configuration file, key, or value."""


class DimensionError(ValueError):
    """Operator or space dimensions are invalid or incompatible."""


class SimulationError(RuntimeError):
    """Base class for numerical failures in the simulation pipeline."""


class DegenerateSteadyStateError(SimulationError):
    """The Liouvillian null space is not one-dimensional (e.g. no dissipation)."""


class ConvergenceError(SimulationError):
    """A solver finished without reaching the required residual."""


class PositivityError(SimulationError):
    """A density matrix violated the numerical positivity tolerance."""


class FitError(SimulationError):
    """Nonlinear least squares failed to converge."""


class PeakAssignmentError(SimulationError):
    """A fitted peak could not be assigned to a photon number."""


class UnresolvedSplittingError(SimulationError):
    """Fewer than two resolvable extrema along the requested cut."""


class SweepFailureError(SimulationError):
    """Too many grid points failed during a sweep."""
