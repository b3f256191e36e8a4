"""Closed-form surface quantities as printed for each connection family.

These are regression references; the definitional computations in
:mod:`srgb.surfaces.geometry` govern all downstream results.
"""

from __future__ import annotations

import enum

import numpy as np

from ..connections import DistributionKind
from ..curves import CurveSpec, _e11_parts, frame_velocity
from ..model_spaces import ModelSpaceId
from .frames import AdaptedFrame

__all__ = [
    "E11AlphaReading",
    "D0Parenthesization",
    "printed_second_fundamental",
    "printed_constant_term",
    "printed_leading_term",
    "leading_candidates",
    "printed_mean_curvature_limit",
    "printed_surface_limit_magnitude",
]


class E11AlphaReading(str, enum.Enum):
    """How to read the stray ``(1 - alpha)`` in the E(1,1) ``h22`` entries."""

    ONE_MINUS_BETA = "one_minus_beta"
    ALPHA_ZERO = "alpha_zero"


class D0Parenthesization(str, enum.Enum):
    """Reading of the last term of ``D0``."""

    RATIO_SQUARED = "ratio_squared"  # ((1-b)^2 + 2)/4 * rho^2
    LITERAL = "literal"  # (((1-b)^2 + 2)/4 * rho)^2


def _e1(fr: AdaptedFrame, d):
    return fr.qbar * d[..., 0] - fr.pbar * d[..., 1]


def _e2h(fr: AdaptedFrame, d):
    return fr.rbar_L * (fr.pbar * d[..., 0] + fr.qbar * d[..., 1])


def _common(fr: AdaptedFrame):
    rt = np.sqrt(fr.L)
    ratio = fr.l / fr.l_L
    h11 = ratio * fr.horizontal_divergence()
    off = -(fr.l_L / fr.l) * _e1(fr, fr.d_rbar_L())
    d_rl = fr.d_rho() / rt
    h22 = -(ratio**2) * _e2h(fr, d_rl) + fr.d_rbar_L()[..., 2] / rt
    return rt, h11, off, h22


def printed_second_fundamental(space, dist, param: float, fr: AdaptedFrame,
                               reading: E11AlphaReading = E11AlphaReading.ONE_MINUS_BETA) -> np.ndarray:
    """Printed ``II`` matrix, shape ``(..., 2, 2)``."""
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = float(param)
    rt, h11, off, h22 = _common(fr)
    pb, qb, pL, qL, rL = fr.pbar, fr.qbar, fr.pbar_L, fr.qbar_L, fr.rbar_L
    L = fr.L
    if space is ModelSpaceId.AFFINE and dist is DistributionKind.H1:
        h12 = off - (1 - a) * rt / 2
        h21 = off - (1 + a * rL**2) * rt / 2 + a * qL * rL
        h22 = h22 - (1 - a) * pL
    elif space is ModelSpaceId.AFFINE:
        h11 = h11 + a * rL * pb * qb * rt / 2
        h12 = off + (a * pL**2 - 1) * rt / 2 + a * rL**2 * pb**2 * rt / 2
        h21 = off - (1 + a * rL * qb**2 - a * pL**2 - a * qL**2) * rt / 2 + a * qL * rL
        h22 = h22 - (1 - a) * pL - a * rL * (pL * qL + rL**2 * pb * qb) * rt / 2
    else:
        stray = 1 - a if E11AlphaReading(reading) is E11AlphaReading.ONE_MINUS_BETA else 1.0
        if dist is DistributionKind.H1:
            h11 = h11 - rL * pb * qb * (1 - a) / rt
            h12 = (off - (1 - a) * rt / 2 + (1 - a) * (qL**2 - pL**2) / (2 * rt)
                   + (1 - a) * rL**2 * (qb**2 - pb**2) / (2 * rt))
            h21 = (off - rt / 2 + (qL**2 - pL**2) / (2 * rt)
                   + qb**2 * rL**2 * (1 - a * L - a) / (2 * rt) - pb**2 * rL**2 * (1 + a * L - a) / (2 * rt))
            h22 = h22 + stray * pL * qL * rL / rt + stray * pb * qb * rL**3 / rt
        else:
            ratio = fr.l / fr.l_L
            h11 = h11 + (a * L + a - 2) / 2 * rL * pb * qb / rt
            h12 = (off - (1 - a * pL**2) * rt / 2 + (qL**2 - pL**2 * (1 - a)) / (2 * rt)
                   + ((1 - a) * pb**2 - qb**2) * rL**2 / (2 * rt))
            h21 = (off + (a * ratio * pL - a * ratio * qL - 1) * rt / 2
                   - (qL * a * ratio + pL * a * ratio) / (2 * rt) + qb**2 * rL**2 * (-L - 1) / (2 * rt))
            h22 = (h22 - a * pL * qL * rL * rt + stray * pL * qL * rL / rt
                   + (1 - a) * (-L - 1) * pL * qL * rL / (2 * rt) - (a * L + a - 2) * pb * qb * rL**2 / 2)
    return np.stack([np.stack([h11, h12], -1), np.stack([h21, h22], -1)], -2)


def printed_constant_term(space, dist, param: float, fr: AdaptedFrame,
                          parenthesization: D0Parenthesization = D0Parenthesization.RATIO_SQUARED) -> np.ndarray:
    """Printed ``L^0`` coefficient of ``K^Sigma`` (``B0``, ``B1``, ``D0`` or ``D1``).

    Only ``L``-free frame data are used, so ``fr`` may be built at any ``L``.
    """
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = float(param)
    pb, qb, rho = fr.pbar, fr.qbar, fr.rho
    e1r = fr.e1_rho()
    div = fr.horizontal_divergence()
    if space is ModelSpaceId.AFFINE and dist is DistributionKind.H1:
        return (-(2 - a) / 2 * e1r - (1 - a) * qb**2 + (4 - 3 * a - a**2) * qb / 2 * rho
                - (3 - a) / 4 * rho**2 - (1 - a) * pb * div)
    if space is ModelSpaceId.AFFINE:
        return (-(2 + a * qb**2) / 2 * e1r - (1 - a) * qb**2
                + (a * pb**2 * (1 + a) + 3 * a - 3) / 4 * rho**2
                + (4 * qb**2 - 5 * a * qb + a**2 * qb * pb**2) / 2 * rho
                - ((1 - a) * pb + a * pb * qb / 2 * rho) * (div + a * pb * qb / 2 * rho))
    if dist is DistributionKind.H1:
        if D0Parenthesization(parenthesization) is D0Parenthesization.RATIO_SQUARED:
            last = ((1 - a) ** 2 + 2) / 4 * rho**2
        else:
            last = (((1 - a) ** 2 + 2) / 4 * rho) ** 2
        return -(2 - a) / 2 * e1r - 5 * (1 - a) * (qb**2 - pb**2) / 4 + last
    return ((a * pb**2 + a * pb + a * qb - 2) / 2 * e1r + (1 - a) ** 2 * (pb**2 - qb**2) / 2
            + (1 - a) * rho**2
            + (-(a + 1) * pb * qb / 2 * rho - a * pb * qb / 2 * rho**2) * (div + a * pb * qb / 2 * rho)
            - ((a * pb - a * qb - 1) * (qb**2 - pb**2 * (1 - a)) - a * (pb + qb) * (a * pb**2 - 1)) / 4)


def leading_candidates(space, dist, param: float, fr: AdaptedFrame) -> dict[str, np.ndarray]:
    """Candidate coefficients of ``L`` in ``K^Sigma``, keyed by provenance.

    The second-kind families state the leading term once in the expansion
    and once (possibly differently) in the integral identity; both are
    returned, together with sign-flipped variants of the identity form.
    """
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = float(param)
    pb, qb = fr.pbar, fr.qbar
    zero = np.zeros_like(pb)
    if dist is DistributionKind.H1:
        return {"expansion": zero}
    if space is ModelSpaceId.AFFINE:
        return {
            "expansion": a**2 * pb**2 / 2,
            "identity": a * pb**2 / 2,
            "identity_negated": -a * pb**2 / 2,
        }
    poly = a * (a - 2 - a * pb**3 + a * pb**2 * qb + pb**2 + pb - qb) / 4
    return {"expansion": poly, "identity": poly, "identity_negated": -poly}


def printed_leading_term(space, dist, param: float, fr: AdaptedFrame) -> np.ndarray:
    """Leading ``L`` coefficient as stated in the asymptotic expansion."""
    return leading_candidates(space, dist, param, fr)["expansion"]


def printed_mean_curvature_limit(space, dist, param: float, fr: AdaptedFrame) -> np.ndarray:
    """Printed ``lim H_L``."""
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = float(param)
    div = fr.horizontal_divergence()
    if space is ModelSpaceId.AFFINE:
        return div - (1 - a) * fr.pbar
    if dist is DistributionKind.H1:
        return div
    pq = fr.pbar * fr.qbar
    return div - pq / 2 * fr.rho - a * pq / 2 * fr.rho**2


def printed_surface_limit_magnitude(space, dist, param: float, fr: AdaptedFrame, curve: CurveSpec, t) -> dict:
    """Printed limit of the signed surface-curve curvature.

    Returns the non-horizontal magnitude, the horizontal-regular signed
    coefficient of ``sqrt(L)`` and the printed discriminant.
    """
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    a = float(param)
    g, gd, gdd = curve.eval(t)
    pb, qb = fr.pbar, fr.qbar
    c, cdot = frame_velocity(space, g, gd, gdd)
    w, wd = c[..., 2], cdot[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        if space is ModelSpaceId.AFFINE:
            g1, d1, d2, d3 = g[..., 0], gd[..., 0], gd[..., 1], gd[..., 2]
            lam1 = qb * d1 / g1 - pb * d3
            if dist is DistributionKind.H1:
                mag = np.abs(pb * (2 - a) * d1 / (2 * g1) + qb * ((1 - a) * d2 / g1 + a * d3 / 2)) / np.abs(w)
                disc = wd
            else:
                mag = np.abs(pb * (2 - a) * d1 / 2 + qb * (1 - a) * d2) / np.abs(g1 * w)
                disc = wd + a * d1 * d3 / (2 * g1)
        else:
            S, _, _ = _e11_parts(g, gd, gdd)
            d3, r2 = gd[..., 2], np.sqrt(2.0)
            lam1 = qb * d3 - r2 / 2 * pb * S
            disc = wd
            if dist is DistributionKind.H1:
                mag = np.abs(r2 * (2 - a) * qb * S / 4 + (2 - a) * pb * d3 / 2) / np.abs(w)
            else:
                mag = np.abs(r2 * (1 - a) * qb * S + (2 - a) * pb * d3) / np.abs(2 * w)
        regular = -lam1 * disc / np.abs(lam1) ** 3
    return {"nonhorizontal_magnitude": mag, "regular_coefficient": regular, "discriminant": disc}
