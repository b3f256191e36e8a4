"""Exception types raised across the package."""

from __future__ import annotations


class SrgbError(Exception):
    """Base class for all package errors."""


class DomainError(SrgbError, ValueError):
    """A point lies outside the coordinate chart of a model space."""


class ParameterError(SrgbError, ValueError):
    """A scalar parameter (L, deformation parameter, tolerance) is invalid."""


class RegularityError(SrgbError, ValueError):
    """A curve has vanishing velocity where regularity is required."""


class CharacteristicPointError(SrgbError, ValueError):
    """The horizontal gradient of a defining function vanishes.

    Attributes:
        report: The :class:`~srgb.surfaces.CharacteristicReport` that
            triggered the error.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NonTangentError(SrgbError, ValueError):
    """A vector expected to be tangent to a surface is not."""


class OffSurfaceError(SrgbError, ValueError):
    """A curve or chart leaves the zero set of the defining function."""


class QuadratureError(SrgbError, RuntimeError):
    """Adaptive quadrature failed to converge or excluded too much area."""


class ExtrapolationError(SrgbError, ValueError):
    """A least-squares extrapolation is under-determined or singular."""


class ConfigError(SrgbError, ValueError):
    """Invalid run configuration or scenario."""
