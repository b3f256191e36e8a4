"""Riemannian approximation of sub-Riemannian geometry on two 3D Lie groups.

Connections, curve and surface curvatures, their ``L -> infinity`` limits
and numerical Gauss-Bonnet checks for the affine group and the group
``E(1,1)`` with deformed Schouten-Van Kampen connections.
"""

from . import connections, curves, errors, fixtures, gauss_bonnet, model_spaces, quadrature, surfaces
from .connections import ConnectionContext, DistributionKind, build_connection
from .curves import CurveSpec, curvature_finite_L, curvature_limit
from .errors import SrgbError
from .model_spaces import ModelSpaceId

__version__ = "0.1.0"

__all__ = [
    "ConnectionContext",
    "CurveSpec",
    "DistributionKind",
    "ModelSpaceId",
    "SrgbError",
    "build_connection",
    "connections",
    "curvature_finite_L",
    "curvature_limit",
    "curves",
    "errors",
    "fixtures",
    "gauss_bonnet",
    "model_spaces",
    "quadrature",
    "surfaces",
]
