# -*- coding: utf-8 -*-

"""Exceptions raised by relfrac.

Soft problems (a kernel tail that does not quite vanish at the box edge, a
Bessel value that saturates) are logged and carried in the ``notes`` of the
returned object instead of being raised.
"""


class RelFracError(Exception):
    """Base class for all errors raised by relfrac."""


class DomainError(RelFracError, ValueError):
    """An argument lies outside the domain of a function."""


class ConfigurationError(RelFracError, ValueError):
    """A parameter set violates one of the required inequalities.

    Parameters
    ----------
    message : str
        The description of the problem.
    inequality : str, optional
        The violated inequality, e.g. "V1 >= m^{2s}".
    key : str, optional
        The configuration key at fault, if there is one.
    """

    def __init__(self, message, inequality=None, key=None):
        super().__init__(message)
        self.inequality = inequality
        self.key = key


class InfeasibleEpsilonError(ConfigurationError):
    """The scaled well region Λ/ε does not fit in an affordable box."""


class NumericalError(RelFracError, ArithmeticError):
    """A computation produced a non-finite or otherwise unusable result."""


class ResolutionError(NumericalError):
    """The grid cannot resolve the requested quantity."""


class ProjectionError(NumericalError):
    """No Nehari scaling exists within the search bounds."""


class PositivityError(NumericalError):
    """A computed ground state has a negative part above tolerance."""


class WindowError(NumericalError):
    """A fitting window contains unusable (nonpositive) samples."""


class NonConvergenceError(NumericalError):
    """An iterative solver stopped at its iteration cap.

    Parameters
    ----------
    message : str
        The description of the problem.
    history : [float]
        The residual at every iteration.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []
