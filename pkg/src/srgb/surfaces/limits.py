"""Sub-Riemannian limits of the signed curvature of curves in surfaces."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..connections import ConnectionContext
from ..curves import CurveSpec, HorizontalClass
from ..model_spaces import ModelSpaceId
from .frames import ImplicitSurface, adapted_frame
from .geometry import signed_limit_constructed, surface_curvatures
from .printed import printed_surface_limit_magnitude

__all__ = ["SIGN_GRID", "surface_curvature_limits"]

SIGN_GRID = (1e4, 1e6, 1e8)


def surface_curvature_limits(space, dist, param: float, surface: ImplicitSurface, curve: CurveSpec, t,
                             L_grid: Sequence[float] = SIGN_GRID) -> dict:
    """Limit signed curvature of a curve in a surface.

    ``k_inf_signed`` takes its magnitude from the printed case formula and
    its sign from the finite-``L`` signed curvature at the largest ``L`` in
    ``L_grid``. Where that finite value vanishes the sign of the
    constructed limit is used. The constructed limit is returned alongside
    as ``k_inf_signed_constructed``.

    For ``HorizontalRegular`` points the value is the coefficient of
    ``sqrt(L)``; for ``HorizontalDegenerate`` points it is 0.
    """
    space = ModelSpaceId.parse(space)
    g, _, _ = curve.eval(t)
    fr = adapted_frame(surface, g, 1.0)
    cons = signed_limit_constructed(space, dist, param, surface, curve, t)
    pr = printed_surface_limit_magnitude(space, dist, param, fr, curve, t)
    ctx = ConnectionContext.build(space, dist, param, max(L_grid))
    fin = surface_curvatures(ctx, surface, curve, t)["k_L_signed"]
    sign = np.sign(fin)
    sign = np.where(sign == 0, np.sign(cons["k_inf_signed"]), sign)
    cls = cons["class"]
    nonh = cls == HorizontalClass.NON_HORIZONTAL.value
    reg = cls == HorizontalClass.HORIZONTAL_REGULAR.value
    mag = np.where(nonh, pr["nonhorizontal_magnitude"], 0.0)
    signed = np.where(nonh, sign * mag, np.where(reg, pr["regular_coefficient"], 0.0))
    return {
        "class": cls,
        "scaling": cons["scaling"],
        "k_inf": np.abs(signed),
        "k_inf_signed": signed,
        "k_inf_signed_constructed": cons["k_inf_signed"],
        "sign_source_L": float(max(L_grid)),
        "omega": cons["omega"],
        "discriminant": cons["discriminant"],
    }


