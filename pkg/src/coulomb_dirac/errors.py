"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CoulombDiracError(Exception):
    """Base class for all errors raised by ``coulomb_dirac``."""


class PoleError(CoulombDiracError, ValueError):
    """A gamma-type function was evaluated at one of its poles."""


class ParameterPole(CoulombDiracError, ValueError):
    """Kummer ``M(a, b, z)`` requested with ``b`` a non-positive integer."""


class BranchCutError(CoulombDiracError, ValueError):
    """Argument lies on a branch cut that the function does not cover."""


class DomainError(CoulombDiracError, ValueError):
    """Spectral parameter or argument outside the admissible set."""


class NotSelfAdjoint(CoulombDiracError, ValueError):
    """The requested (nu, kappa, theta) does not define a self-adjoint operator."""


class RegimeError(CoulombDiracError, ValueError):
    """Operation called for parameters outside its regime."""


class KappaZero(CoulombDiracError, ValueError):
    """Connection coefficients do not exist for kappa = 0."""


class GridTooCoarse(CoulombDiracError, ValueError):
    """The supplied grid does not resolve the requested quantity."""


class UnsupportedGrid(CoulombDiracError, ValueError):
    """Input function is not supported inside the grid."""


class NearZeroLambda(CoulombDiracError, ValueError):
    """Spectral density requested too close to lambda = 0."""


class DivergentIntegral(CoulombDiracError, ArithmeticError):
    """A weighted integral does not converge on the supplied grid."""


class SizeError(CoulombDiracError, ValueError):
    """Dense matrix would exceed the configured maximum size."""


class NonConvergence(CoulombDiracError, ArithmeticError):
    """An iterative limit (e.g. tau -> 0) failed to stabilise."""


class UnboundedPotential(CoulombDiracError, ValueError):
    """The positive part of the potential is not bounded on the grid."""


class MissingEnvelope(CoulombDiracError, ValueError):
    """Two-dimensional analysis needs a radial envelope R with Q <= R."""


class ChannelCutTooSmall(CoulombDiracError, ValueError):
    """The channel cut-off is below the first 'large' channel kappa_nu."""


class UnknownSeries(CoulombDiracError, KeyError):
    """Requested plot series is not present in a result payload."""


class ConfigError(CoulombDiracError, ValueError):
    """Run configuration failed validation."""


class AccuracyLoss(UserWarning):
    """Two evaluation regimes of a special function disagree."""
