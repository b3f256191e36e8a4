"""Implicit surfaces and their adapted orthonormal frames."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import CharacteristicPointError, NonTangentError
from ..model_spaces import ModelSpaceId, check_points, frame_at, frame_jacobian, metric_inner

__all__ = [
    "ImplicitSurface",
    "CharacteristicReport",
    "AdaptedFrame",
    "CHARACTERISTIC_THRESHOLD",
    "characteristic_report",
    "adapted_frame",
    "tangent_ops",
]

CHARACTERISTIC_THRESHOLD = 1e-6
FD_STEP = 1e-5


@dataclass(frozen=True)
class ImplicitSurface:
    """Zero set of a smooth function ``u``.

    ``grad`` and ``hess`` are Euclidean derivatives in coordinates. When
    ``hess`` is omitted it is approximated by central differences of
    ``grad``.
    """

    space: ModelSpaceId
    u: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "surface"

    def euclidean_hessian(self, p: np.ndarray) -> np.ndarray:
        if self.hess is not None:
            return np.asarray(self.hess(p), float)
        p = np.asarray(p, float)
        out = np.empty(p.shape + (3,))
        for b in range(3):
            h = FD_STEP * np.maximum(1.0, np.abs(p[..., b]))
            dp = np.zeros_like(p)
            dp[..., b] = h
            out[..., b, :] = (self.grad(p + dp) - self.grad(p - dp)) / (2 * h[..., None])
        return out

    def frame_derivs(self, p) -> np.ndarray:
        """``(X1 u, X2 u, X3 u)``."""
        p = check_points(self.space, p)
        return np.einsum("...aj,...a->...j", frame_at(self.space, p), self.grad(p))

    def frame_hessian(self, p) -> np.ndarray:
        """Matrix ``H[m, j] = X_m (X_j u)``."""
        p = check_points(self.space, p)
        F = frame_at(self.space, p)
        dF = frame_jacobian(self.space, p)
        grad = self.grad(p)
        hess = self.euclidean_hessian(p)
        # X_j u = sum_a F[a, j] u_a; differentiate along X_m = sum_b F[b, m] d_b
        d_b = np.einsum("...baj,...a->...bj", dF, grad) + np.einsum("...aj,...ba->...bj", F, hess)
        return np.einsum("...bm,...bj->...mj", F, d_b)


@dataclass(frozen=True)
class CharacteristicReport:
    is_characteristic: np.ndarray
    l_value: np.ndarray
    threshold: float


def characteristic_report(surface: ImplicitSurface, p, threshold: float = CHARACTERISTIC_THRESHOLD) -> CharacteristicReport:
    """Flag points where the horizontal gradient is negligible.

    A point is characteristic when ``l < threshold * |(X1u, X2u, X3u)|``;
    the reference norm does not depend on ``L``.
    """
    d = surface.frame_derivs(p)
    l = np.hypot(d[..., 0], d[..., 1])
    ref = np.linalg.norm(d, axis=-1)
    return CharacteristicReport(l < threshold * ref, l, threshold)


@dataclass(frozen=True)
class AdaptedFrame:
    """Adapted frame data at one or many surface points.

    Vectors (``nu``, ``e1``, ``e2``) are frame coefficients against
    ``X1, X2, X3``. ``H`` is the frame Hessian, kept for derivatives.
    """

    L: float
    p: np.ndarray
    q: np.ndarray
    s: np.ndarray  # X3 u
    H: np.ndarray

    @property
    def r(self):
        return self.s / np.sqrt(self.L)

    @property
    def l(self):
        return np.hypot(self.p, self.q)

    @property
    def l_L(self):
        return np.sqrt(self.p**2 + self.q**2 + self.r**2)

    @property
    def pbar(self):
        return self.p / self.l

    @property
    def qbar(self):
        return self.q / self.l

    @property
    def pbar_L(self):
        return self.p / self.l_L

    @property
    def qbar_L(self):
        return self.q / self.l_L

    @property
    def rbar_L(self):
        return self.r / self.l_L

    @property
    def rho(self):
        """``X3u / |grad_H u|``."""
        return self.s / self.l

    @property
    def nu(self) -> np.ndarray:
        return np.stack([self.pbar_L, self.qbar_L, self.rbar_L / np.sqrt(self.L)], axis=-1)

    @property
    def e1(self) -> np.ndarray:
        return np.stack([self.qbar, -self.pbar, np.zeros_like(self.p)], axis=-1)

    @property
    def e2(self) -> np.ndarray:
        return np.stack(
            [self.rbar_L * self.pbar, self.rbar_L * self.qbar, -(self.l / self.l_L) / np.sqrt(self.L)], axis=-1
        )

    # Frame derivatives X_m of scalar quantities, returned with a trailing axis m.
    def d_p(self):
        return self.H[..., :, 0]

    def d_q(self):
        return self.H[..., :, 1]

    def d_s(self):
        return self.H[..., :, 2]

    def d_l(self):
        return (self.p[..., None] * self.d_p() + self.q[..., None] * self.d_q()) / self.l[..., None]

    def d_l_L(self):
        num = self.p[..., None] * self.d_p() + self.q[..., None] * self.d_q() + self.s[..., None] * self.d_s() / self.L
        return num / self.l_L[..., None]

    def _quot(self, num, dnum, den, dden):
        return dnum / den[..., None] - num[..., None] * dden / den[..., None] ** 2

    def d_pbar(self):
        return self._quot(self.p, self.d_p(), self.l, self.d_l())

    def d_qbar(self):
        return self._quot(self.q, self.d_q(), self.l, self.d_l())

    def d_rho(self):
        return self._quot(self.s, self.d_s(), self.l, self.d_l())

    def d_rbar_L(self):
        rt = np.sqrt(self.L)
        return self._quot(self.s / rt, self.d_s() / rt, self.l_L, self.d_l_L())

    def d_nu(self) -> np.ndarray:
        """``X_m`` of the normal coefficients, shape ``(..., m, k)``."""
        v = np.stack([self.p, self.q, self.s / self.L], axis=-1)
        dv = np.stack([self.d_p(), self.d_q(), self.d_s() / self.L], axis=-1)
        return dv / self.l_L[..., None, None] - v[..., None, :] * self.d_l_L()[..., :, None] / self.l_L[..., None, None] ** 2

    def horizontal_divergence(self):
        """``X1(pbar) + X2(qbar)``."""
        return self.d_pbar()[..., 0] + self.d_qbar()[..., 1]

    def e1_rho(self):
        """``<e1, grad_H(X3u/|grad_H u|)>`` (horizontal inner product)."""
        d = self.d_rho()
        return self.qbar * d[..., 0] - self.pbar * d[..., 1]


def adapted_frame(surface: ImplicitSurface, p, L: float, threshold: float = CHARACTERISTIC_THRESHOLD,
                  allow_characteristic: bool = False) -> AdaptedFrame:
    """Adapted frame at ``p`` for the metric ``g_L``.

    Raises:
        CharacteristicPointError: if any point is characteristic and
            ``allow_characteristic`` is false.
    """
    p = check_points(surface.space, p)
    d = surface.frame_derivs(p)
    rep = characteristic_report(surface, p, threshold)
    if not allow_characteristic and np.any(rep.is_characteristic):
        raise CharacteristicPointError("characteristic point on surface", rep)
    return AdaptedFrame(float(L), d[..., 0], d[..., 1], d[..., 2], surface.frame_hessian(p))


def tangent_ops(frame: AdaptedFrame, v, tol: float = 1e-8) -> dict:
    """Rotation ``J_L`` and ``(e1, e2)`` components of a tangent vector.

    Raises:
        NonTangentError: if ``v`` has a normal component above ``tol * |v|``.
    """
    v = np.asarray(v, float)
    L = frame.L
    nrm = np.sqrt(metric_inner(L, v, v))
    if np.any(np.abs(metric_inner(L, v, frame.nu)) > tol * np.maximum(nrm, 1e-300)):
        raise NonTangentError("vector is not tangent to the surface")
    lam1 = metric_inner(L, v, frame.e1)
    lam2 = metric_inner(L, v, frame.e2)
    J = lam1[..., None] * frame.e2 - lam2[..., None] * frame.e1
    return {"J": J, "lambda1": lam1, "lambda2": lam2}
