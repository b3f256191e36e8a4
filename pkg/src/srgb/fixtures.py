"""Named surfaces, curves and Gauss-Bonnet scenarios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import CurveSpec
from .errors import ConfigError
from .gauss_bonnet import GBScenario
from .model_spaces import ModelSpaceId
from .quadrature import SurfaceChart
from .surfaces import ImplicitSurface

__all__ = [
    "CurveFixture",
    "SURFACES",
    "CURVES",
    "SCENARIOS",
    "SURFACE_CURVES",
    "surface",
    "curve",
    "scenario",
    "surface_curve",
    "chart",
    "circle",
    "superellipse",
]

AFFINE, E11 = ModelSpaceId.AFFINE, ModelSpaceId.E11


def _shape(p):
    return np.shape(p)[:-1]


def _const_grad(vec):
    vec = np.asarray(vec, float)
    return lambda p: np.broadcast_to(vec, _shape(p) + (3,)).copy()


def _zero_hess(p):
    return np.zeros(_shape(p) + (3, 3))


def _linear(space, vec, offset=0.0, name="plane") -> ImplicitSurface:
    vec = np.asarray(vec, float)
    return ImplicitSurface(space, lambda p: np.asarray(p, float) @ vec - offset, _const_grad(vec), _zero_hess, name)


def _bump(space, amp=0.3, name="bump") -> ImplicitSurface:
    """``x3 = amp * sin(x1) * cos(x2)``."""

    def u(p):
        return p[..., 2] - amp * np.sin(p[..., 0]) * np.cos(p[..., 1])

    def grad(p):
        a, b = p[..., 0], p[..., 1]
        return np.stack([-amp * np.cos(a) * np.cos(b), amp * np.sin(a) * np.sin(b), np.ones_like(a)], -1)

    def hess(p):
        a, b = p[..., 0], p[..., 1]
        H = np.zeros(_shape(p) + (3, 3))
        H[..., 0, 0] = H[..., 1, 1] = amp * np.sin(a) * np.cos(b)
        H[..., 0, 1] = H[..., 1, 0] = amp * np.cos(a) * np.sin(b)
        return H

    return ImplicitSurface(space, u, grad, hess, name)


SURFACES: dict[str, Callable[[], ImplicitSurface]] = {
    "affine-x3": lambda: _linear(AFFINE, [0, 0, 1], name="affine-x3"),
    "affine-x2": lambda: _linear(AFFINE, [0, 1, 0], name="affine-x2"),
    "affine-x1": lambda: _linear(AFFINE, [1, 0, 0], 2.0, name="affine-x1"),
    "affine-bump": lambda: _bump(AFFINE, name="affine-bump"),
    "e11-x3": lambda: _linear(E11, [0, 0, 1], name="e11-x3"),
    "e11-x1x2": lambda: _linear(E11, [1, 1, 0], name="e11-x1x2"),
    "e11-bump": lambda: _bump(E11, name="e11-bump"),
}


def surface(name: str) -> ImplicitSurface:
    try:
        return SURFACES[name]()
    except KeyError:
        raise ConfigError(f"unknown surface fixture {name!r}") from None


# ---------------------------------------------------------------------------
# Curves

def _curve(fn: Callable, dfn: Callable, ddfn: Callable, domain, name, closed=False) -> CurveSpec:
    def func(t):
        t = np.asarray(t, float)
        return (np.stack(fn(t), -1), np.stack(dfn(t), -1), np.stack(ddfn(t), -1))

    return CurveSpec(func, domain, name, closed)


def circle(center, radius: float, plane: tuple[int, int], sign: int = 1, name: str = "circle",
           lift: Callable | None = None) -> CurveSpec:
    """Closed circle ``center + r (cos t, sign sin t)`` in the coordinate plane ``plane``.

    ``lift`` optionally sets the remaining coordinate as ``lift(x_i, x_j)``
    (with its first and second derivatives supplied by finite closed forms
    only for the bump fixtures below).
    """
    center = np.asarray(center, float)
    i, j = plane
    k = 3 - i - j

    def func(t):
        t = np.asarray(t, float)
        g = np.broadcast_to(center, t.shape + (3,)).copy()
        gd = np.zeros(t.shape + (3,))
        gdd = np.zeros(t.shape + (3,))
        g[..., i] += radius * np.cos(t)
        g[..., j] += sign * radius * np.sin(t)
        gd[..., i] = -radius * np.sin(t)
        gd[..., j] = sign * radius * np.cos(t)
        gdd[..., i] = -radius * np.cos(t)
        gdd[..., j] = -sign * radius * np.sin(t)
        if lift is not None:
            h, hd, hdd = lift(g[..., i], g[..., j], gd[..., i], gd[..., j], gdd[..., i], gdd[..., j])
            g[..., k], gd[..., k], gdd[..., k] = h, hd, hdd
        return g, gd, gdd

    return CurveSpec(func, (0.0, 2 * math.pi), name, True)


def superellipse(center, radius: float, plane: tuple[int, int], exponent: int = 8, sign: int = 1,
                 name: str = "superellipse") -> CurveSpec:
    """Smooth closed superellipse ``|x|^n + |y|^n = r^n`` via ``r (cos t, sin t) / N(t)``."""
    center = np.asarray(center, float)
    i, j = plane
    n = float(exponent)

    def func(t):
        t = np.asarray(t, float)
        c, s = np.cos(t), np.sin(t)
        N = (c**n + s**n) ** (1 / n)
        dN = N ** (1 - n) * (-c ** (n - 1) * s + s ** (n - 1) * c)
        # second derivative by product rule on N^(1-n) * m(t)
        m = -c ** (n - 1) * s + s ** (n - 1) * c
        dm = ((n - 1) * c ** (n - 2) * s**2 - c**n + (n - 1) * s ** (n - 2) * c**2 - s**n)
        ddN = (1 - n) * N ** (-n) * dN * m + N ** (1 - n) * dm
        x, y = c / N, s / N
        dx = (-s * N - c * dN) / N**2
        dy = (c * N - s * dN) / N**2
        ddx = (-c * N - s * dN + s * dN - c * ddN) / N**2 - 2 * dN * (-s * N - c * dN) / N**3
        ddy = (-s * N + c * dN - c * dN - s * ddN) / N**2 - 2 * dN * (c * N - s * dN) / N**3
        g = np.broadcast_to(center, t.shape + (3,)).copy()
        gd = np.zeros(t.shape + (3,))
        gdd = np.zeros(t.shape + (3,))
        g[..., i] += radius * x
        g[..., j] += sign * radius * y
        gd[..., i], gd[..., j] = radius * dx, sign * radius * dy
        gdd[..., i], gdd[..., j] = radius * ddx, sign * radius * ddy
        return g, gd, gdd

    return CurveSpec(func, (0.0, 2 * math.pi), name, True)


def _bump_lift(x, y, dx, dy, ddx, ddy, amp=0.3):
    h = amp * np.sin(x) * np.cos(y)
    hx, hy = amp * np.cos(x) * np.cos(y), -amp * np.sin(x) * np.sin(y)
    hxx = hyy = -h
    hxy = -amp * np.cos(x) * np.sin(y)
    hd = hx * dx + hy * dy
    hdd = hxx * dx**2 + 2 * hxy * dx * dy + hyy * dy**2 + hx * ddx + hy * ddy
    return h, hd, hdd


@dataclass(frozen=True)
class CurveFixture:
    space: ModelSpaceId
    curve: CurveSpec
    t: float
    note: str = ""


def _lin(*coefs):
    """Polynomial coordinates ``x_k = a + b t + c t^2`` from triples."""
    co = [np.asarray(c, float) for c in coefs]
    return (
        lambda t: [c[0] + c[1] * t + c[2] * t**2 for c in co],
        lambda t: [c[1] + 2 * c[2] * t for c in co],
        lambda t: [2 * c[2] + 0 * t for c in co],
    )


def _exp_generic():
    return (
        lambda t: [np.exp(0.3 * t), t + t**2, 0.5 * t],
        lambda t: [0.3 * np.exp(0.3 * t), 1 + 2 * t, 0.5 + 0 * t],
        lambda t: [0.09 * np.exp(0.3 * t), 2 + 0 * t, 0 * t],
    )


def _e11_generic():
    return (
        lambda t: [np.sin(t), t**2 - 0.5 * t, 0.2 + 0.4 * t],
        lambda t: [np.cos(t), 2 * t - 0.5, 0.4 + 0 * t],
        lambda t: [-np.sin(t), 2 + 0 * t, 0 * t],
    )


CURVES: dict[str, Callable[[], CurveFixture]] = {
    "affine-line": lambda: CurveFixture(AFFINE, _curve(*_lin((1, 0, 0), (0, 1, 0), (0, 0, 0)), (0.0, 1.0), "affine-line"),
                                        0.5, "integral curve of X3 at x1 = 1"),
    "affine-x1-flow": lambda: CurveFixture(
        AFFINE, _curve(lambda t: [np.exp(t), 0 * t, 0 * t], lambda t: [np.exp(t), 0 * t, 0 * t],
                       lambda t: [np.exp(t), 0 * t, 0 * t], (0.0, 1.0), "affine-x1-flow"), 0.5, "integral curve of X1"),
    "affine-generic": lambda: CurveFixture(AFFINE, _curve(*_exp_generic(), (0.0, 1.0), "affine-generic"), 0.4),
    "affine-horizontal": lambda: CurveFixture(
        AFFINE, _curve(*_lin((1, 1, 0), (0, 1, 1), (0, 1, 0)), (-0.5, 0.5), "affine-horizontal"), 0.0,
        "omega vanishes at t = 0 with nonzero derivative"),
    "e11-line": lambda: CurveFixture(E11, _curve(*_lin((0, -math.sqrt(2), 0), (0, 0, 0), (0, 0, 0)), (0.0, 1.0),
                                                 "e11-line"), 0.5, "integral curve of X3 at x3 = 0"),
    "e11-x1-flow": lambda: CurveFixture(E11, _curve(*_lin((0, 0, 0), (0, 0, 0), (0, 1, 0)), (0.0, 1.0), "e11-x1-flow"),
                                        0.5, "integral curve of X1"),
    "e11-generic": lambda: CurveFixture(E11, _curve(*_e11_generic(), (0.0, 1.0), "e11-generic"), 0.3),
    "e11-horizontal": lambda: CurveFixture(
        E11, _curve(*_lin((0, 1, 0), (0, -1, 1), (0, 0.3, 0)), (-0.5, 0.5), "e11-horizontal"), 0.0,
        "omega vanishes at t = 0 with nonzero derivative"),
}


def curve(name: str) -> CurveFixture:
    try:
        return CURVES[name]()
    except KeyError:
        raise ConfigError(f"unknown curve fixture {name!r}") from None


SURFACE_CURVES: dict[str, Callable[[], tuple[str, CurveFixture]]] = {
    "affine-x3-line": lambda: ("affine-x3", CurveFixture(
        AFFINE, _curve(*_lin((1, 0, 0), (0, 1, 0), (0, 0, 0)), (0.0, 1.0), "affine-x3-line"), 0.5)),
    "affine-x3-ellipse": lambda: ("affine-x3", CurveFixture(
        AFFINE, _curve(lambda t: [1 + 0.1 * np.cos(t), np.sin(t), 0 * t],
                       lambda t: [-0.1 * np.sin(t), np.cos(t), 0 * t],
                       lambda t: [-0.1 * np.cos(t), -np.sin(t), 0 * t], (0.0, 2 * math.pi), "affine-x3-ellipse", True),
        math.pi / 4)),
    "e11-x3-circle": lambda: ("e11-x3", CurveFixture(E11, circle((0, 0, 0), 1.0, (0, 1), name="e11-x3-circle"), 0.7)),
}


def surface_curve(name: str) -> tuple[ImplicitSurface, CurveFixture]:
    try:
        sname, fx = SURFACE_CURVES[name]()
    except KeyError:
        raise ConfigError(f"unknown surface-curve fixture {name!r}") from None
    return surface(sname), fx


# ---------------------------------------------------------------------------
# Charts and scenarios

def _polar_chart(surf: ImplicitSurface, center, plane, radius=1.0, sign=1, lift=None, name="disk") -> SurfaceChart:
    center = np.asarray(center, float)
    i, j = plane
    k = 3 - i - j

    def phi(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        p = np.broadcast_to(center, s.shape + (3,)).copy()
        p[..., i] += s * np.cos(t)
        p[..., j] += sign * s * np.sin(t)
        if lift is not None:
            p[..., k] = lift(p[..., i], p[..., j], 0, 0, 0, 0)[0]
        return p

    def dphi(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        a = np.zeros(s.shape + (3,))
        b = np.zeros(s.shape + (3,))
        a[..., i], a[..., j] = np.cos(t), sign * np.sin(t)
        b[..., i], b[..., j] = -s * np.sin(t), sign * s * np.cos(t)
        if lift is not None:
            x, y = center[i] + s * np.cos(t), center[j] + sign * s * np.sin(t)
            a[..., k] = lift(x, y, a[..., i], a[..., j], 0, 0)[1]
            b[..., k] = lift(x, y, b[..., i], b[..., j], 0, 0)[1]
        return a, b

    return SurfaceChart(surf, phi, dphi, (0.0, radius, 0.0, 2 * math.pi), 1, name)


def _x1x2_chart(surf: ImplicitSurface) -> SurfaceChart:
    def phi(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        return np.stack([s, -s, t], -1)

    def dphi(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        one, zero = np.ones_like(s), np.zeros_like(s)
        return np.stack([one, -one, zero], -1), np.stack([zero, zero, one], -1)

    return SurfaceChart(surf, phi, dphi, (-1.0, 1.0, -1.0, 1.0), 1, "e11-x1x2-square")


def _disk_area_affine(c: float, r: float = 1.0) -> float:
    """``iint dx1 dx2 / x1^2`` over the disk of radius ``r`` centred at ``x1 = c``."""
    return 2 * math.pi * (c / math.sqrt(c * c - r * r) - 1)


def _scenario_affine_x3():
    s = surface("affine-x3")
    return GBScenario("affine-x3-disk", AFFINE, _polar_chart(s, (2, 0, 0), (0, 1), name="affine-x3-disk"),
                      (circle((2, 0, 0), 1.0, (0, 1), sign=-1, name="affine-x3-boundary"),),
                      analytic_area=_disk_area_affine(2.0))


def _scenario_affine_x2():
    s = surface("affine-x2")
    return GBScenario("affine-x2-surface", AFFINE, _polar_chart(s, (2, 0, 0), (0, 2), name="affine-x2-disk"),
                      (circle((2, 0, 0), 1.0, (0, 2), sign=1, name="affine-x2-boundary"),))


def _scenario_affine_x1():
    s = surface("affine-x1")
    return GBScenario("affine-x1-plane", AFFINE, _polar_chart(s, (2, 0, 0), (1, 2), name="affine-x1-disk"),
                      (circle((2, 0, 0), 1.0, (1, 2), sign=-1, name="affine-x1-boundary"),))


def _scenario_affine_bump():
    s = surface("affine-bump")
    return GBScenario("affine-bump-disk", AFFINE,
                      _polar_chart(s, (2, 0, 0), (0, 1), radius=0.8, lift=_bump_lift, name="affine-bump-disk"),
                      (circle((2, 0, 0), 0.8, (0, 1), sign=-1, name="affine-bump-boundary", lift=_bump_lift),))


def _scenario_e11_x3():
    s = surface("e11-x3")
    return GBScenario("e11-x3-disk", E11, _polar_chart(s, (0, 0, 0), (0, 1), name="e11-x3-disk"),
                      (circle((0, 0, 0), 1.0, (0, 1), sign=1, name="e11-x3-boundary"),))


def _scenario_e11_bump():
    s = surface("e11-bump")
    return GBScenario("e11-bump-disk", E11,
                      _polar_chart(s, (0.5, 0.2, 0), (0, 1), radius=0.8, lift=_bump_lift, name="e11-bump-disk"),
                      (circle((0.5, 0.2, 0), 0.8, (0, 1), sign=1, name="e11-bump-boundary", lift=_bump_lift),))


def _scenario_e11_x1x2():
    s = surface("e11-x1x2")
    base = superellipse((0, 0, 0), 1.0, (0, 2), exponent=8, name="e11-x1x2-boundary")
    # phase so that the characteristic rays (x3 = 0) run through scan-cell centres
    t0 = -math.pi / 64

    def lift(g):
        g[..., 1] = -g[..., 0]
        return g

    def func(t):
        g, gd, gdd = base.func(np.asarray(t, float) + t0)
        return lift(g), lift(gd), lift(gdd)

    boundary = CurveSpec(func, (0.0, 2 * math.pi), base.name, True)

    def phi(s_, t):
        s_, t = np.broadcast_arrays(np.asarray(s_, float), np.asarray(t, float))
        return s_[..., None] * func(t - t0)[0]

    def dphi(s_, t):
        s_, t = np.broadcast_arrays(np.asarray(s_, float), np.asarray(t, float))
        g, gd, _ = func(t - t0)
        return g, s_[..., None] * gd

    chart = SurfaceChart(s, phi, dphi, (0.0, 1.0, t0, t0 + 2 * math.pi), 1, "e11-x1x2-superellipse")
    return GBScenario("e11-x1x2-surface", E11, chart, (boundary,))


def chart(name: str) -> SurfaceChart:
    """Standalone charts (exclusion tests and CLI surface reports)."""
    if name == "e11-x1x2-square":
        return _x1x2_chart(surface("e11-x1x2"))
    return scenario(name).chart


SCENARIOS: dict[str, Callable[[], GBScenario]] = {
    "affine-x3-disk": _scenario_affine_x3,
    "affine-x2-surface": _scenario_affine_x2,
    "affine-x1-plane": _scenario_affine_x1,
    "affine-bump-disk": _scenario_affine_bump,
    "e11-x3-disk": _scenario_e11_x3,
    "e11-bump-disk": _scenario_e11_bump,
    "e11-x1x2-surface": _scenario_e11_x1x2,
}


def scenario(name: str) -> GBScenario:
    try:
        return SCENARIOS[name]()
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}") from None
