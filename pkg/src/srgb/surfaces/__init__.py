"""Adapted frames, surface curvatures and the ``K^Sigma`` expansions."""

from .frames import (
    CHARACTERISTIC_THRESHOLD,
    AdaptedFrame,
    CharacteristicReport,
    ImplicitSurface,
    adapted_frame,
    characteristic_report,
    tangent_ops,
)
from .geometry import (
    DEFAULT_EXPANSION_GRID,
    ON_SURFACE_TOL,
    ExpansionFit,
    ambient_riemann,
    brioschi_curvature,
    expansion_fit,
    gauss_sectional,
    second_fundamental,
    signed_limit_constructed,
    surface_curvatures,
)
from .limits import SIGN_GRID, surface_curvature_limits
from .printed import (
    D0Parenthesization,
    E11AlphaReading,
    leading_candidates,
    printed_constant_term,
    printed_leading_term,
    printed_mean_curvature_limit,
    printed_second_fundamental,
    printed_surface_limit_magnitude,
)

riemann_tensor = ambient_riemann

__all__ = [name for name in dir() if not name.startswith("_")]
