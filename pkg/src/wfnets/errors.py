"""Exception hierarchy shared across the package."""


class WfnetsError(Exception):
    """Base class for all package errors."""


class ParameterError(WfnetsError):
    """A model or run parameter is missing, non-finite, or invalid."""


class ShapeError(WfnetsError):
    """Array lengths or lattice sizes are incompatible."""


class InputError(WfnetsError):
    """An analysis routine received inputs outside its contract."""


class ConvergenceError(WfnetsError):
    """DMRG did not reach the requested tolerance.

    Carries ``last_delta``, the energy change of the final sweep.
    """

    def __init__(self, message, last_delta=None, energy=None):
        super().__init__(message)
        self.last_delta = last_delta
        self.energy = energy


class NumericalError(WfnetsError):
    """A numerical invariant was violated (non-normalized state, bad probabilities, ...)."""


class EstimatorError(WfnetsError):
    """An estimator cannot produce a finite value on the given data."""
