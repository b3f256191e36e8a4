"""Curvature of curves at finite L and in the limit L -> infinity.

The generic path works in frame coefficients: a curve's velocity is
``c = W(gamma) gamma'`` with ``W`` the coframe matrix, its derivative follows
from the chain rule, and the covariant acceleration is
``c' + sum_ij c_i c_j Gamma[i, j]``.

Limits are obtained without extrapolation. Every deformed table splits
exactly as ``L*G1 + G0 + G_{-1}/L``, so the squared curvature is a ratio of
Laurent polynomials in ``L`` whose leading terms give the limit.

Printed closed forms are provided in :mod:`srgb.curves` as ``printed_*``
functions; they serve as cross-checks only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .connections import ConnectionContext, DistributionKind, laurent_split
from .errors import RegularityError
from .model_spaces import ModelSpaceId, coframe_jacobian, coframe_matrix, metric_diag

__all__ = [
    "CurveSpec",
    "HorizontalClass",
    "Scaling",
    "CurveLimit",
    "HORIZONTAL_TOL",
    "DISCRIMINANT_TOL",
    "reparametrize",
    "frame_velocity",
    "omega_along",
    "covariant_accel",
    "curvature_from_accel",
    "curvature_finite_L",
    "curvature_limit",
    "limit_from_frame_data",
    "classify",
    "printed_velocity",
    "printed_accel",
    "printed_curvature_finite_L",
    "printed_curvature_limit",
]

HORIZONTAL_TOL = 1e-8
DISCRIMINANT_TOL = 1e-8
RADICAND_CLAMP = -1e-12

Triple = tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class CurveSpec:
    """An analytic C^2 curve.

    Attributes:
        func: Vectorized map ``t -> (gamma, gamma_dot, gamma_ddot)``; for an
            input of shape ``(n,)`` each output has shape ``(n, 3)``.
        domain: Parameter interval ``(a, b)``.
        name: Registry name, informational.
        closed: Whether ``gamma(a) == gamma(b)`` is intended.
    """

    func: Callable[[np.ndarray], Triple]
    domain: tuple[float, float] = (0.0, 1.0)
    name: str = "curve"
    closed: bool = False

    def eval(self, t) -> Triple:
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        g, gd, gdd = (np.asarray(x, dtype=float) for x in self.func(flat))
        shape = t.shape + (3,)
        return g.reshape(shape), gd.reshape(shape), gdd.reshape(shape)

    def reversed(self) -> "CurveSpec":
        a, b = self.domain

        def func(t):
            g, gd, gdd = self.func(a + b - t)
            return g, -gd, gdd

        return CurveSpec(func, self.domain, self.name + "-reversed", self.closed)


def reparametrize(curve: CurveSpec, phi, dphi, ddphi, domain: tuple[float, float]) -> CurveSpec:
    """Curve ``s -> gamma(phi(s))`` with the derivatives of ``phi`` supplied."""

    def func(s):
        t = phi(s)
        g, gd, gdd = curve.func(t)
        d1 = np.asarray(dphi(s), float)[..., None]
        d2 = np.asarray(ddphi(s), float)[..., None]
        return g, gd * d1, gdd * d1**2 + gd * d2

    return CurveSpec(func, domain, curve.name + "-reparam", curve.closed)


class HorizontalClass(str, enum.Enum):
    NON_HORIZONTAL = "NonHorizontal"
    HORIZONTAL_REGULAR = "HorizontalRegular"
    HORIZONTAL_DEGENERATE = "HorizontalDegenerate"


class Scaling(str, enum.Enum):
    FINITE = "Finite"
    SQRT_L = "SqrtL"


def frame_velocity(space: ModelSpaceId, g, gd, gdd) -> tuple[np.ndarray, np.ndarray]:
    """Frame coefficients of the velocity and their time derivative."""
    w = coframe_matrix(space, g)
    dw = coframe_jacobian(space, g)
    c = np.einsum("...ia,...a->...i", w, gd)
    wdot = np.einsum("...bia,...b->...ia", dw, gd)
    cdot = np.einsum("...ia,...a->...i", wdot, gd) + np.einsum("...ia,...a->...i", w, gdd)
    return c, cdot


def _check_regular(gd: np.ndarray) -> None:
    if np.any(np.linalg.norm(gd, axis=-1) == 0.0):
        raise RegularityError("curve velocity vanishes")


def omega_along(space: ModelSpaceId, curve: CurveSpec, t) -> tuple[np.ndarray, np.ndarray]:
    """``omega(gamma')`` and its time derivative at ``t``."""
    space = ModelSpaceId.parse(space)
    g, gd, gdd = curve.eval(t)
    _check_regular(gd)
    c, cdot = frame_velocity(space, g, gd, gdd)
    return c[..., 2], cdot[..., 2]


def _accel(gamma: np.ndarray, c: np.ndarray, cdot: np.ndarray) -> np.ndarray:
    return cdot + np.einsum("...i,...j,ijk->...k", c, c, gamma)


def covariant_accel(ctx: ConnectionContext, curve: CurveSpec, t) -> np.ndarray:
    """Covariant acceleration ``nabla_{gamma'} gamma'`` in frame coefficients."""
    g, gd, gdd = curve.eval(t)
    _check_regular(gd)
    c, cdot = frame_velocity(ctx.space, g, gd, gdd)
    return _accel(ctx.gamma, c, cdot)


def curvature_from_accel(L: float, c: np.ndarray, accel: np.ndarray) -> np.ndarray:
    """Curvature from velocity and acceleration via the projected-norm formula.

    ``k^2 = |A|^2/|v|^4 - <A, v>^2/|v|^6``, with small negative radicands
    from rounding clamped to zero.
    """
    gm = metric_diag(L)
    vv = np.einsum("...i,i,...i->...", c, gm, c)
    aa = np.einsum("...i,i,...i->...", accel, gm, accel)
    av = np.einsum("...i,i,...i->...", accel, gm, c)
    rad = aa / vv**2 - av**2 / vv**3
    scale = np.maximum(aa / vv**2, 1.0)
    bad = rad < RADICAND_CLAMP * scale
    if np.any(bad):
        raise ArithmeticError(f"negative curvature radicand {np.min(rad)}")
    return np.sqrt(np.maximum(rad, 0.0))


def curvature_finite_L(ctx: ConnectionContext, curve: CurveSpec, t) -> np.ndarray:
    """Curvature ``k^L`` of a curve for the connection in ``ctx``."""
    g, gd, gdd = curve.eval(t)
    _check_regular(gd)
    c, cdot = frame_velocity(ctx.space, g, gd, gdd)
    return curvature_from_accel(ctx.L, c, _accel(ctx.gamma, c, cdot))


@dataclass
class CurveLimit:
    """Limit data for one or more parameter values (array fields)."""

    cls: np.ndarray
    value: np.ndarray
    scaling: np.ndarray
    omega: np.ndarray
    discriminant: np.ndarray
    extra: dict = field(default_factory=dict)

    def first(self) -> dict:
        """Plain-Python record for the first (or only) entry."""
        idx = (0,) * np.ndim(self.value)
        return {
            "class": HorizontalClass(self.cls[idx]).value,
            "value": float(self.value[idx]),
            "scaling": Scaling(self.scaling[idx]).value,
            "omega": float(self.omega[idx]),
            "discriminant": float(self.discriminant[idx]),
        }


def classify(omega, disc, speed, accel_scale=1.0, tol: float = HORIZONTAL_TOL,
             disc_tol: float = DISCRIMINANT_TOL) -> np.ndarray:
    """Horizontality class from ``omega``, the discriminant and scales."""
    omega = np.asarray(omega, float)
    horiz = np.abs(omega) < tol * np.asarray(speed, float)
    degen = np.abs(disc) < disc_tol * np.maximum(1.0, accel_scale)
    out = np.where(horiz, np.where(degen, HorizontalClass.HORIZONTAL_DEGENERATE.value,
                                   HorizontalClass.HORIZONTAL_REGULAR.value),
                   HorizontalClass.NON_HORIZONTAL.value)
    return out.astype(object)


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[ea + eb] = out.get(ea + eb, 0.0) + ca * cb
    return out


def _poly_add(a: dict, b: dict, sign: float = 1.0) -> dict:
    out = dict(a)
    for e, cb in b.items():
        out[e] = out.get(e, 0.0) + sign * cb
    return out


def limit_from_frame_data(space, dist, param: float, c: np.ndarray, cdot: np.ndarray, speed,
                          accel_scale=1.0, tol: float = HORIZONTAL_TOL,
                          disc_tol: float = DISCRIMINANT_TOL) -> CurveLimit:
    """Limit curvature from velocity coefficients and their derivatives.

    Args:
        space, dist, param: Connection family.
        c, cdot: Frame velocity and its time derivative, shape ``(..., 3)``.
        speed: Euclidean coordinate speed, used to scale the horizontality test.
        accel_scale: Scale for the discriminant test.

    Returns:
        A :class:`CurveLimit`. For the ``SqrtL`` class ``value`` is
        ``lim k^L / sqrt(L)``.
    """
    G1, G0, Gm = laurent_split(space, dist, param)
    c = np.array(c, float)
    cdot = np.asarray(cdot, float)
    omega = c[..., 2].copy()
    horiz = np.abs(omega) < tol * np.asarray(speed, float)
    c[..., 2] = np.where(horiz, 0.0, c[..., 2])
    V = {1: np.einsum("...i,...j,ijk->...k", c, c, G1),
         0: cdot + np.einsum("...i,...j,ijk->...k", c, c, G0),
         -1: np.einsum("...i,...j,ijk->...k", c, c, Gm)}
    disc = V[0][..., 2].copy()
    cls = classify(omega, disc, speed, accel_scale, tol, disc_tol)
    degen = cls == HorizontalClass.HORIZONTAL_DEGENERATE.value
    V[0][..., 2] = np.where(degen, 0.0, V[0][..., 2])

    h = c[..., 0] ** 2 + c[..., 1] ** 2
    vv = {0: h, 1: c[..., 2] ** 2}
    aa: dict = {}
    av: dict = {}
    for p, Vp in V.items():
        av = _poly_add(av, {p: Vp[..., 0] * c[..., 0] + Vp[..., 1] * c[..., 1], p + 1: Vp[..., 2] * c[..., 2]})
        for q, Vq in V.items():
            aa = _poly_add(aa, {p + q: Vp[..., 0] * Vq[..., 0] + Vp[..., 1] * Vq[..., 1],
                                p + q + 1: Vp[..., 2] * Vq[..., 2]})
    N = _poly_add(_poly_mul(aa, vv), _poly_mul(av, av), -1.0)
    zero = np.zeros_like(h)
    n3, n1, n0 = N.get(3, zero), N.get(1, zero), N.get(0, zero)
    with np.errstate(divide="ignore", invalid="ignore"):
        nonh = np.sqrt(np.maximum(n3, 0.0)) / np.abs(omega) ** 3
        regular = np.sqrt(np.maximum(n1, 0.0)) / h**1.5
        degenerate = np.sqrt(np.maximum(n0, 0.0)) / h**1.5
    value = np.where(cls == HorizontalClass.NON_HORIZONTAL.value, nonh,
                     np.where(cls == HorizontalClass.HORIZONTAL_REGULAR.value, regular, degenerate))
    scaling = np.where(cls == HorizontalClass.HORIZONTAL_REGULAR.value, Scaling.SQRT_L.value,
                       Scaling.FINITE.value).astype(object)
    top = max(N)
    growth = {e: N[e] for e in N if e > 3}
    extra = {"max_excess_coefficient": float(max((np.max(np.abs(v)) for v in growth.values()), default=0.0)),
             "top_power": top}
    return CurveLimit(cls, value, scaling, omega, disc, extra)


def curvature_limit(space, dist, param: float, curve: CurveSpec, t, tol: float = HORIZONTAL_TOL,
                    disc_tol: float = DISCRIMINANT_TOL) -> CurveLimit:
    """Sub-Riemannian limit of the curve curvature at ``t``.

    The class is decided by ``omega(gamma')`` and the ``L^0`` part of the
    ``X3`` component of the acceleration (the discriminant).
    """
    space = ModelSpaceId.parse(space)
    g, gd, gdd = curve.eval(t)
    _check_regular(gd)
    c, cdot = frame_velocity(space, g, gd, gdd)
    speed = np.linalg.norm(gd, axis=-1)
    scale = np.maximum(speed**2, np.linalg.norm(gdd, axis=-1))
    return limit_from_frame_data(space, dist, param, c, cdot, speed, scale, tol, disc_tol)


# ---------------------------------------------------------------------------
# Printed closed forms (coordinate expressions), kept for cross-checking.

def _e11_parts(g, gd, gdd):
    e = np.exp(g[..., 2])
    ei = 1.0 / e
    S = -ei * gd[..., 0] + e * gd[..., 1]
    T = gdd[..., 1] * e + gd[..., 1] * gd[..., 2] * e - gdd[..., 0] * ei + gd[..., 0] * gd[..., 2] * ei
    omega = -(np.sqrt(2.0) / 2) * (ei * gd[..., 0] + e * gd[..., 1])
    return S, T, omega


def _omega_dot(space, g, gd, gdd):
    _, cdot = frame_velocity(space, g, gd, gdd)
    return cdot[..., 2]


def printed_velocity(space, g, gd) -> np.ndarray:
    """Velocity decomposition in closed form."""
    space = ModelSpaceId.parse(space)
    if space is ModelSpaceId.AFFINE:
        omega = gd[..., 1] / g[..., 0] - gd[..., 2]
        return np.stack([gd[..., 0] / g[..., 0], gd[..., 2], omega], axis=-1)
    S, _, omega = _e11_parts(g, gd, np.zeros_like(gd))
    return np.stack([gd[..., 2], np.sqrt(2.0) / 2 * S, omega], axis=-1)


def printed_accel(space, dist, param: float, L: float, g, gd, gdd) -> np.ndarray:
    """Covariant acceleration as printed for each family."""
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = param
    wd = _omega_dot(space, g, gd, gdd)
    if space is ModelSpaceId.AFFINE:
        g1, d1, d2, d3 = g[..., 0], gd[..., 0], gd[..., 1], gd[..., 2]
        w = d2 / g1 - d3
        base1 = (gdd[..., 0] * g1 - d1**2) / g1**2
        v2 = gdd[..., 2] - (2 - a) * d1 * L / (2 * g1) * w
        if dist is DistributionKind.H1:
            v1 = base1 + L * w * ((1 - a) * d2 / g1 + a * d3 / 2)
            v3 = wd - (1 - a) * d1 / g1 * w
        else:
            v1 = base1 + (1 - a) * d2 * L / g1 * w
            v3 = wd + a * d1 * d3 / (2 * g1) - (1 - a) * d1 / g1 * w
        return np.stack([v1, v2, v3], axis=-1)
    S, T, w = _e11_parts(g, gd, gdd)
    d3, r2 = gd[..., 2], np.sqrt(2.0)
    if dist is DistributionKind.H1:
        v1 = gdd[..., 2] + r2 * (L + 1) * (2 - a) / 4 * S * w
        v2 = r2 / 2 * T + (a * L - a - 2 * L) / 2 * w * d3
        v3 = wd - r2 * (1 - a) / (2 * L) * S * d3
    else:
        v1 = gdd[..., 2] + r2 * (L + 1) * (1 - a) / 2 * w * S
        v2 = r2 / 2 * T + (a * L + a - 2 * L) / 2 * w * d3
        v3 = wd - r2 / (2 * L) * S * d3
    return np.stack([v1, v2, v3], axis=-1)


def printed_curvature_finite_L(space, dist, param: float, L: float, curve: CurveSpec, t) -> np.ndarray:
    """Finite-L curvature assembled from the printed velocity and acceleration."""
    g, gd, gdd = curve.eval(t)
    c = printed_velocity(space, g, gd)
    return curvature_from_accel(L, c, printed_accel(space, dist, param, L, g, gd, gdd))


def printed_curvature_limit(space, dist, param: float, curve: CurveSpec, t,
                            tol: float = HORIZONTAL_TOL, disc_tol: float = DISCRIMINANT_TOL) -> dict:
    """Printed case formulas for the limit curvature at a single ``t``.

    The case split uses the printed discriminant of each family. The
    degenerate case is evaluated from the horizontal part of the printed
    acceleration.
    """
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = param
    g, gd, gdd = (x.reshape(3) for x in curve.eval(np.atleast_1d(float(t))))
    c = printed_velocity(space, g, gd)
    w = c[2]
    wd = float(_omega_dot(space, g, gd, gdd))
    speed = float(np.linalg.norm(gd))
    h = c[0] ** 2 + c[1] ** 2
    if space is ModelSpaceId.AFFINE:
        g1, d1, d2, d3 = g[0], gd[0], gd[1], gd[2]
        disc = wd + (a * d1 * d3 / (2 * g1) if dist is DistributionKind.H2 else 0.0)
        if dist is DistributionKind.H1:
            num = ((1 - a) * d2 / g1 + a / 2 * d3) ** 2 + ((2 - a) * d1 / (2 * g1)) ** 2
        else:
            num = ((1 - a) * d2 / g1) ** 2 + ((2 - a) * d1 / (2 * g1)) ** 2
        nonh = np.sqrt(num) / abs(w) if w != 0 else np.inf
    else:
        S, _, _ = _e11_parts(g, gd, gdd)
        disc = wd
        if dist is DistributionKind.H1:
            nonh = np.sqrt(((2 - a) * S) ** 2 / 8 + (2 - a) ** 2 * gd[2] ** 2 / 4) / abs(w) if w != 0 else np.inf
        else:
            nonh = np.sqrt(((1 - a) * S) ** 2 + (2 - a) ** 2 * gd[2] ** 2) / abs(2 * w) if w != 0 else np.inf
    scale = max(speed**2, float(np.linalg.norm(gdd)))
    cls = classify(w, disc, speed, scale, tol, disc_tol).item()
    if cls == HorizontalClass.NON_HORIZONTAL.value:
        return {"class": cls, "value": float(nonh), "scaling": Scaling.FINITE.value}
    if cls == HorizontalClass.HORIZONTAL_REGULAR.value:
        return {"class": cls, "value": float(abs(disc) / h), "scaling": Scaling.SQRT_L.value}
    acc = printed_accel(space, dist, param, 1.0, g[None], gd[None], gdd[None])[0]
    ah = acc[:2]
    k2 = (ah @ ah) / h**2 - (ah @ c[:2]) ** 2 / h**3
    return {"class": cls, "value": float(np.sqrt(max(k2, 0.0))), "scaling": Scaling.FINITE.value}
