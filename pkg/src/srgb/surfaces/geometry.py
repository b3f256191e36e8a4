"""Curvatures of curves in surfaces, second fundamental form and Gauss equation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..connections import ConnectionContext, laurent_split, riemann_tensor as _riemann
from ..curves import (
    DISCRIMINANT_TOL,
    HORIZONTAL_TOL,
    CurveSpec,
    HorizontalClass,
    Scaling,
    _check_regular,
    classify,
    frame_velocity,
)
from ..errors import ExtrapolationError, OffSurfaceError
from ..model_spaces import metric_inner
from .frames import AdaptedFrame, ImplicitSurface, adapted_frame

__all__ = [
    "ON_SURFACE_TOL",
    "surface_curvatures",
    "signed_limit_constructed",
    "second_fundamental",
    "ambient_riemann",
    "gauss_sectional",
    "ExpansionFit",
    "expansion_fit",
    "DEFAULT_EXPANSION_GRID",
    "brioschi_curvature",
]

ON_SURFACE_TOL = 1e-9
DEFAULT_EXPANSION_GRID = (1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8)


def _curve_on_surface(surface: ImplicitSurface, g: np.ndarray, tol: float = ON_SURFACE_TOL) -> None:
    res = np.abs(surface.u(g))
    if np.any(res >= tol):
        raise OffSurfaceError(f"curve leaves the surface, |u| = {float(np.max(res)):.3e}")


def _frame_and_accel(ctx: ConnectionContext, surface: ImplicitSurface, curve: CurveSpec, t):
    g, gd, gdd = curve.eval(t)
    _check_regular(gd)
    _curve_on_surface(surface, g)
    fr = adapted_frame(surface, g, ctx.L)
    c, cdot = frame_velocity(ctx.space, g, gd, gdd)
    acc = cdot + np.einsum("...i,...j,ijk->...k", c, c, ctx.gamma)
    return fr, c, acc


def surface_curvatures(ctx: ConnectionContext, surface: ImplicitSurface, curve: CurveSpec, t) -> dict:
    """Geodesic and signed geodesic curvature of a curve lying in ``surface``.

    The tangential part of the ambient covariant acceleration is expanded
    in ``(e1, e2)``; the signed value pairs it with ``J_L`` of the velocity.

    Returns:
        Dict with arrays ``k_L``, ``k_L_signed``, ``lambda`` and ``mu``.
    """
    fr, c, acc = _frame_and_accel(ctx, surface, curve, t)
    L = ctx.L
    lam1, lam2 = metric_inner(L, c, fr.e1), metric_inner(L, c, fr.e2)
    mu1, mu2 = metric_inner(L, acc, fr.e1), metric_inner(L, acc, fr.e2)
    n2 = lam1**2 + lam2**2
    signed = (mu2 * lam1 - mu1 * lam2) / n2**1.5
    return {
        "k_L": np.abs(signed),
        "k_L_signed": signed,
        "lambda": np.stack([lam1, lam2], axis=-1),
        "mu": np.stack([mu1, mu2], axis=-1),
    }


def signed_limit_constructed(space, dist, param: float, surface: ImplicitSurface, curve: CurveSpec, t,
                             tol: float = HORIZONTAL_TOL, disc_tol: float = DISCRIMINANT_TOL) -> dict:
    """Exact ``L -> infinity`` limit of the signed curvature from the Laurent split.

    Writing ``e2 = kappa L^{-1/2} (rho pbar, rho qbar, -1)`` with
    ``kappa -> 1``, the leading orders of ``mu2 lambda1 - mu1 lambda2`` and
    ``|lambda|^3`` give the limit for each horizontality class.
    """
    g, gd, gdd = curve.eval(t)
    _check_regular(gd)
    _curve_on_surface(surface, g)
    fr = adapted_frame(surface, g, 1.0)
    c, cdot = frame_velocity(surface.space, g, gd, gdd)
    G1, G0, _ = laurent_split(space, dist, param)
    V1 = np.einsum("...i,...j,ijk->...k", c, c, G1)
    V0 = cdot + np.einsum("...i,...j,ijk->...k", c, c, G0)
    pb, qb = fr.pbar, fr.qbar
    lam1 = qb * c[..., 0] - pb * c[..., 1]
    omega = c[..., 2]
    speed = np.linalg.norm(gd, axis=-1)
    scale = np.maximum(speed**2, np.linalg.norm(gdd, axis=-1))
    disc = V0[..., 2]
    cls = classify(omega, disc, speed, scale, tol, disc_tol)
    nonh = cls == HorizontalClass.NON_HORIZONTAL.value
    reg = cls == HorizontalClass.HORIZONTAL_REGULAR.value
    with np.errstate(divide="ignore", invalid="ignore"):
        top = -V1[..., 2] * lam1 + (qb * V1[..., 0] - pb * V1[..., 1]) * omega
        v_nonh = top / np.abs(omega) ** 3
        v_reg = -disc * lam1 / np.abs(lam1) ** 3
    value = np.where(nonh, v_nonh, np.where(reg, v_reg, 0.0))
    scaling = np.where(reg, Scaling.SQRT_L.value, Scaling.FINITE.value).astype(object)
    return {"class": cls, "k_inf_signed": value, "scaling": scaling, "omega": omega, "discriminant": disc}


def _nabla_e_nu(ctx: ConnectionContext, fr: AdaptedFrame) -> tuple[np.ndarray, np.ndarray]:
    dnu = fr.d_nu()
    nu = fr.nu
    out = []
    for e in (fr.e1, fr.e2):
        deriv = np.einsum("...m,...mk->...k", e, dnu)
        out.append(deriv + np.einsum("...i,...j,ijk->...k", e, nu, ctx.gamma))
    return out[0], out[1]


def second_fundamental(ctx: ConnectionContext, surface: ImplicitSurface, p) -> dict:
    """Definitional second fundamental form ``h_ij = <nabla_{e_i} nu, e_j>_L``.

    Returns:
        Dict with ``II`` of shape ``(..., 2, 2)`` and its trace ``H``.
    """
    fr = adapted_frame(surface, p, ctx.L)
    a1, a2 = _nabla_e_nu(ctx, fr)
    L = ctx.L
    II = np.stack(
        [
            np.stack([metric_inner(L, a1, fr.e1), metric_inner(L, a1, fr.e2)], axis=-1),
            np.stack([metric_inner(L, a2, fr.e1), metric_inner(L, a2, fr.e2)], axis=-1),
        ],
        axis=-2,
    )
    return {"II": II, "H": II[..., 0, 0] + II[..., 1, 1], "frame": fr}


def ambient_riemann(ctx: ConnectionContext) -> np.ndarray:
    """Curvature table ``R[i, j, k, :]`` of the connection in ``ctx``."""
    return _riemann(np.asarray(ctx.gamma, float), ctx.brackets.c)


def gauss_sectional(ctx: ConnectionContext, surface: ImplicitSurface, p) -> dict:
    """Ambient sectional curvature of the tangent plane and ``K^Sigma``.

    ``K_amb = -<R(e1, e2) e1, e2>_L`` and ``K_sigma = K_amb + det II``.
    """
    sf = second_fundamental(ctx, surface, p)
    fr = sf["frame"]
    R = ambient_riemann(ctx)
    v = np.einsum("...i,...j,...k,ijkn->...n", fr.e1, fr.e2, fr.e1, R)
    K_amb = -metric_inner(ctx.L, v, fr.e2)
    det = np.linalg.det(sf["II"])
    return {"K_amb": K_amb, "K_sigma": K_amb + det, "det_II": det, "II": sf["II"], "H": sf["H"]}


@dataclass(frozen=True)
class ExpansionFit:
    """Fit of ``K^Sigma(L) = c_lead L + c_0 + c_half L^{-1/2} + c_one L^{-1}``."""

    c_lead: np.ndarray
    c_0: np.ndarray
    c_half: np.ndarray
    c_one: np.ndarray
    fit_residual: np.ndarray
    L_grid: tuple[float, ...]


def expansion_fit(space, dist, param: float, surface: ImplicitSurface, p,
                  L_grid: Sequence[float] = DEFAULT_EXPANSION_GRID) -> ExpansionFit:
    """Least-squares asymptotic fit of ``K^Sigma`` over a grid of ``L``.

    Columns are scaled by their maximum so the design stays well conditioned
    across eight decades.

    Raises:
        ExtrapolationError: if the grid has fewer than 6 distinct values.
    """
    grid = np.array(sorted(set(float(x) for x in L_grid)))
    if grid.size < 6:
        raise ExtrapolationError("expansion fit needs at least 6 distinct L values")
    samples = np.stack(
        [gauss_sectional(ConnectionContext.build(space, dist, param, L), surface, p)["K_sigma"] for L in grid],
        axis=0,
    )
    A = np.stack([grid, np.ones_like(grid), grid**-0.5, grid**-1.0], axis=1)
    scale = np.max(np.abs(A), axis=0)
    flat = samples.reshape(grid.size, -1)
    coef, *_ = np.linalg.lstsq(A / scale, flat, rcond=None)
    coef = coef / scale[:, None]
    resid = np.max(np.abs(A @ coef - flat), axis=0)
    shape = samples.shape[1:]
    c = [coef[i].reshape(shape) for i in range(4)]
    return ExpansionFit(c[0], c[1], c[2], c[3], resid.reshape(shape), tuple(grid))


def brioschi_curvature(space, L: float, phi: Callable, s: float, t: float, h: float = 1e-2) -> float:
    """Gaussian curvature of the metric induced by ``g_L`` on a chart.

    Independent oracle: the first fundamental form is sampled on a 5x5
    stencil and differentiated by fourth-order central differences, then
    fed to the Brioschi formula.
    """
    from ..model_spaces import coordinate_to_frame

    def fff(ss, tt):
        def pt(a, b):
            return np.asarray(phi(a, b), float)

        dh = 1e-5
        x = pt(ss, tt)
        xs = (pt(ss + dh, tt) - pt(ss - dh, tt)) / (2 * dh)
        xt = (pt(ss, tt + dh) - pt(ss, tt - dh)) / (2 * dh)
        a = coordinate_to_frame(space, x, xs)
        b = coordinate_to_frame(space, x, xt)
        return np.array([metric_inner(L, a, a), metric_inner(L, a, b), metric_inner(L, b, b)])

    offs = np.arange(-2, 3)
    grid = np.array([[fff(s + i * h, t + j * h) for j in offs] for i in offs])  # [i, j, EFG]
    w1 = np.array([1, -8, 0, 8, -1]) / (12 * h)
    w2 = np.array([-1, 16, -30, 16, -1]) / (12 * h**2)
    E, F, G = grid[2, 2]
    d_s = np.einsum("i,ik->k", w1, grid[:, 2])
    d_t = np.einsum("j,jk->k", w1, grid[2, :])
    d_ss = np.einsum("i,ik->k", w2, grid[:, 2])
    d_tt = np.einsum("j,jk->k", w2, grid[2, :])
    d_st = np.einsum("i,j,ijk->k", w1, w1, grid)
    Es, Fs, Gs = d_s
    Et, Ft, Gt = d_t
    M1 = np.array([
        [-0.5 * d_tt[0] + d_st[1] - 0.5 * d_ss[2], 0.5 * Es, Fs - 0.5 * Et],
        [Ft - 0.5 * Gs, E, F],
        [0.5 * Gt, F, G],
    ])
    M2 = np.array([[0.0, 0.5 * Et, 0.5 * Gs], [0.5 * Et, E, F], [0.5 * Gs, F, G]])
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F**2) ** 2)
