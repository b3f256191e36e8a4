"""Measures, adaptive quadrature and extrapolation in ``L``.

The 1D engine is adaptive Simpson processed level by level, so each
refinement level is a single vectorized integrand call. Many integrals can
share one call (``integrate_many``); the 2D rule nests this engine, running
all inner integrals of an outer level together.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .curves import CurveSpec, frame_velocity
from .errors import CharacteristicPointError, ExtrapolationError, ParameterError, QuadratureError
from .model_spaces import ModelSpaceId, coordinate_to_frame, metric_inner
from .surfaces.frames import CHARACTERISTIC_THRESHOLD, ImplicitSurface, characteristic_report

__all__ = [
    "MAX_LEVEL",
    "SIGMA_BAR_GRID",
    "MeasureKind",
    "ExtrapolationModel",
    "SurfaceChart",
    "SurfaceIntegral",
    "integrate_many",
    "adaptive_simpson",
    "measure_density",
    "curve_density",
    "chart_density",
    "sigma_bar_extrapolated",
    "line_integral",
    "principal_value_integral",
    "surface_integral",
    "limit_extrapolate",
]

MAX_LEVEL = 20
INITIAL_PANELS = 8
SIGMA_BAR_GRID = (1e2, 1e3, 1e4, 1e5, 1e6)
SCAN_CELLS = 64


class MeasureKind(str, enum.Enum):
    DS_L = "dsL"
    DS = "ds"
    DS_BAR = "dsBar"
    DSIGMA_L = "dSigmaL"
    DSIGMA = "dSigma"
    DSIGMA_BAR = "dSigmaBar"

    @property
    def is_line(self) -> bool:
        return self in (MeasureKind.DS_L, MeasureKind.DS, MeasureKind.DS_BAR)


class ExtrapolationModel(str, enum.Enum):
    A_PLUS_B_OVER_SQRTL = "A_plus_B_over_sqrtL"
    A_PLUS_B_OVER_L = "A_plus_B_over_L"
    A_L_PLUS_B = "A_L_plus_B"


# ---------------------------------------------------------------------------
# 1D engine

def integrate_many(f: Callable[[np.ndarray, np.ndarray], np.ndarray], a, b, tol,
                   max_level: int = MAX_LEVEL, initial_panels: int = INITIAL_PANELS) -> tuple[np.ndarray, np.ndarray]:
    """Integrate several functions at once by adaptive Simpson.

    Args:
        f: ``f(idx, x)`` evaluates integrand number ``idx[k]`` at ``x[k]``.
        a, b: Interval endpoints, shape ``(n,)``.
        tol: Absolute error targets, shape ``(n,)`` or scalar.
        max_level: Refinement cap (levels of bisection).
        initial_panels: Uniform panels per interval before refinement.

    Returns:
        ``(values, error_estimates)``, each of shape ``(n,)``.

    Raises:
        QuadratureError: if a panel is still unresolved at ``max_level``.
    """
    a = np.atleast_1d(np.asarray(a, float))
    b = np.atleast_1d(np.asarray(b, float))
    n = a.size
    tol = np.broadcast_to(np.asarray(tol, float), (n,))
    width = b - a
    k = initial_panels
    idx = np.repeat(np.arange(n), k)
    frac = np.tile(np.arange(k + 1) / k, (n, 1))
    edges = a[:, None] + width[:, None] * frac
    lo, hi = edges[:, :-1].ravel(), edges[:, 1:].ravel()
    mid = 0.5 * (lo + hi)
    # one call for all three Simpson nodes
    vals = np.asarray(f(np.concatenate([idx, idx, idx]), np.concatenate([lo, mid, hi])), float)
    m = idx.size
    flo, fmid, fhi = vals[:m], vals[m:2 * m], vals[2 * m:]
    ptol = tol[idx] / k
    whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi)
    parts: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []  # (idx, position, value, err)
    for _ in range(max_level):
        if idx.size == 0:
            break
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fv = np.asarray(f(np.concatenate([idx, idx]), np.concatenate([lm, rm])), float)
        flm, frm = fv[: idx.size], fv[idx.size:]
        h = hi - lo
        left = h / 12 * (flo + 4 * flm + fmid)
        right = h / 12 * (fmid + 4 * frm + fhi)
        diff = left + right - whole
        ok = np.abs(diff) <= 15 * ptol
        if not np.all(np.isfinite(diff)):
            raise QuadratureError("non-finite integrand value")
        if np.any(ok):
            parts.append((idx[ok], lo[ok], (left + right + diff / 15)[ok], np.abs(diff[ok]) / 15))
        keep = ~ok
        idx, lo, mid, hi = idx[keep], lo[keep], mid[keep], hi[keep]
        flo, fmid, fhi, flm, frm = flo[keep], fmid[keep], fhi[keep], flm[keep], frm[keep]
        ptol = ptol[keep] / 2
        left, right = left[keep], right[keep]
        # children: [lo, mid] with midpoint lm, [mid, hi] with midpoint rm
        idx = np.concatenate([idx, idx])
        lo, mid_new, hi = np.concatenate([lo, mid]), np.concatenate([lm[keep], rm[keep]]), np.concatenate([mid, hi])
        flo, fmid, fhi = np.concatenate([flo, fmid]), np.concatenate([flm, frm]), np.concatenate([fmid, fhi])
        ptol = np.concatenate([ptol, ptol])
        whole = np.concatenate([left, right])
        mid = mid_new
    if idx.size:
        raise QuadratureError(f"adaptive Simpson did not converge within {max_level} levels "
                              f"({idx.size} unresolved panels)")
    if not parts:
        return np.zeros(n), np.zeros(n)
    pidx = np.concatenate([p[0] for p in parts])
    ppos = np.concatenate([p[1] for p in parts])
    pval = np.concatenate([p[2] for p in parts])
    perr = np.concatenate([p[3] for p in parts])
    order = np.lexsort((ppos, pidx))
    pidx, pval, perr = pidx[order], pval[order], perr[order]
    bounds = np.searchsorted(pidx, np.arange(n + 1))
    values = np.array([math.fsum(pval[bounds[i]:bounds[i + 1]]) for i in range(n)])
    errs = np.array([math.fsum(perr[bounds[i]:bounds[i + 1]]) for i in range(n)])
    return values, errs


def adaptive_simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, tol: float = 1e-10,
                     max_level: int = MAX_LEVEL) -> tuple[float, float]:
    """Adaptive Simpson for a single vectorized integrand ``f(x)``."""
    v, e = integrate_many(lambda _i, x: f(x), [a], [b], tol, max_level)
    return float(v[0]), float(e[0])


# ---------------------------------------------------------------------------
# Densities

def curve_density(space, curve: CurveSpec, t, L: float | None, kind: MeasureKind) -> np.ndarray:
    """Density of a line measure with respect to ``dt``.

    Raises:
        ParameterError: if ``dsL`` is requested without a positive ``L``.
        ArithmeticError: if ``dsBar`` is evaluated at a horizontal point.
    """
    kind = MeasureKind(kind)
    space = ModelSpaceId.parse(space)
    g, gd, gdd = curve.eval(t)
    c, _ = frame_velocity(space, g, gd, gdd)
    if kind is MeasureKind.DS_L:
        if L is None or L <= 0:
            raise ParameterError("dsL needs L > 0")
        return np.sqrt(c[..., 0] ** 2 + c[..., 1] ** 2 + L * c[..., 2] ** 2)
    if kind is MeasureKind.DS:
        return np.abs(c[..., 2])
    if kind is MeasureKind.DS_BAR:
        w = np.abs(c[..., 2])
        if np.any(w == 0):
            raise ArithmeticError("dsBar density is undefined at horizontal points")
        return (c[..., 0] ** 2 + c[..., 1] ** 2) / (2 * w)
    raise ParameterError(f"{kind.value} is not a line measure")


@dataclass(frozen=True)
class SurfaceChart:
    """Parametrized piece of an implicit surface.

    Attributes:
        surface: The surface the chart lies in.
        phi: ``(s, t) -> points`` of shape ``(..., 3)``.
        dphi: ``(s, t) -> (phi_s, phi_t)``.
        rect: ``(s0, s1, t0, t1)``.
        orientation: ``+1`` or ``-1``; multiplies ``dSigma``.
    """

    surface: ImplicitSurface
    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    rect: tuple[float, float, float, float]
    orientation: int = 1
    name: str = "chart"

    @property
    def space(self) -> ModelSpaceId:
        return self.surface.space

    def reversed(self) -> "SurfaceChart":
        return replace(self, orientation=-self.orientation)

    def restrict(self, rect: tuple[float, float, float, float]) -> "SurfaceChart":
        return replace(self, rect=tuple(float(x) for x in rect))

    def validate(self, n: int = 9, tol: float = 1e-9) -> None:
        """Check that the chart maps into the surface on an ``n x n`` grid."""
        s0, s1, t0, t1 = self.rect
        S, T = np.meshgrid(np.linspace(s0, s1, n), np.linspace(t0, t1, n), indexing="ij")
        res = np.abs(self.surface.u(self.phi(S, T)))
        if np.max(res) >= tol:
            from .errors import OffSurfaceError

            raise OffSurfaceError(f"chart leaves the surface, |u| = {np.max(res):.3e}")


def _chart_frame_vectors(chart: SurfaceChart, s, t):
    pts = chart.phi(s, t)
    ps, pt = chart.dphi(s, t)
    return pts, coordinate_to_frame(chart.space, pts, ps), coordinate_to_frame(chart.space, pts, pt)


def chart_density(chart: SurfaceChart, s, t, L: float | None, kind: MeasureKind) -> np.ndarray:
    """Density of a surface measure with respect to ``ds dt`` on a chart.

    ``dSigmaBar`` is the ``1/L`` coefficient of ``L^{-1/2} dSigmaL``. It is
    evaluated in closed form; :func:`sigma_bar_extrapolated` recovers the
    same coefficient by fitting samples over ``SIGMA_BAR_GRID``.
    """
    kind = MeasureKind(kind)
    pts, A, B = _chart_frame_vectors(chart, np.asarray(s, float), np.asarray(t, float))
    if kind is MeasureKind.DSIGMA_L:
        if L is None or L <= 0:
            raise ParameterError("dSigmaL needs L > 0")
        E, F, G = metric_inner(L, A, A), metric_inner(L, A, B), metric_inner(L, B, B)
        return np.sqrt(np.maximum(E * G - F**2, 0.0))
    if kind is MeasureKind.DSIGMA:
        d = chart.surface.frame_derivs(pts)
        l = np.hypot(d[..., 0], d[..., 1])
        if np.any(l == 0):
            raise CharacteristicPointError("dSigma at a characteristic point",
                                           characteristic_report(chart.surface, pts))
        pb, qb = d[..., 0] / l, d[..., 1] / l
        form = (pb * A[..., 1] - qb * A[..., 0]) * B[..., 2] - (pb * B[..., 1] - qb * B[..., 0]) * A[..., 2]
        return chart.orientation * np.abs(form)
    if kind is MeasureKind.DSIGMA_BAR:
        # EG - F^2 = (a x b)^2 + L |a3 b - b3 a|^2 with a, b the horizontal parts
        cross = A[..., 0] * B[..., 1] - A[..., 1] * B[..., 0]
        den = np.hypot(A[..., 2] * B[..., 0] - B[..., 2] * A[..., 0], A[..., 2] * B[..., 1] - B[..., 2] * A[..., 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            bar = np.where(den > 0, cross**2 / (2 * den), 0.0)
        return chart.orientation * bar
    raise ParameterError(f"{kind.value} is not a surface measure")


def sigma_bar_extrapolated(chart: SurfaceChart, s, t,
                           sigma_bar_grid: Sequence[float] = SIGMA_BAR_GRID) -> np.ndarray:
    """``dSigmaBar`` density from a fit of ``L^{-1/2} dSigmaL`` samples."""
    grid = np.asarray(sigma_bar_grid, float)
    samples = np.stack([chart_density(chart, s, t, L_, MeasureKind.DSIGMA_L) / np.sqrt(L_) for L_ in grid])
    fit = limit_extrapolate(list(zip(grid, samples)), ExtrapolationModel.A_PLUS_B_OVER_L, extra_terms=2)
    return chart.orientation * fit["coefficients"][1]


def measure_density(space, obj, at, L: float | None, kind) -> np.ndarray:
    """Density of ``kind`` for a curve (``at = t``) or a chart (``at = (s, t)``)."""
    kind = MeasureKind(kind)
    if kind.is_line:
        return curve_density(space, obj, at, L, kind)
    s, t = at
    return chart_density(obj, s, t, L, kind)


# ---------------------------------------------------------------------------
# Integrals

def line_integral(curve: CurveSpec, integrand: Callable[[np.ndarray], np.ndarray] | None, kind, L: float | None,
                  tol: float = 1e-10, space=None) -> float:
    """``int integrand * d(kind)`` over the curve's domain.

    ``integrand=None`` integrates the measure itself. ``space`` defaults to
    the one implied by the integrand's caller and must be given for
    measures that need the frame.
    """
    if space is None:
        raise ParameterError("space is required for line integrals")
    kind = MeasureKind(kind)

    def f(t):
        dens = curve_density(space, curve, t, L, kind)
        return dens if integrand is None else np.asarray(integrand(t), float) * dens

    a, b = curve.domain
    return adaptive_simpson(f, a, b, tol)[0]


def _omega_roots(space, curve: CurveSpec, n: int = 4096) -> list[float]:
    a, b = curve.domain

    def w(t):
        g, gd, gdd = curve.eval(np.atleast_1d(t))
        return frame_velocity(space, g, gd, gdd)[0][..., 2]

    ts = np.linspace(a, b, n + 1)
    ws = w(ts)
    roots = [float(t) for t, v in zip(ts, ws) if v == 0.0]
    for i in np.nonzero(ws[:-1] * ws[1:] < 0)[0]:
        roots.append(brentq(lambda x: float(w(x)[0]), ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15))
    roots = sorted(set(roots))
    if curve.closed and len(roots) > 1 and math.isclose(roots[0], a) and math.isclose(roots[-1], b):
        roots = roots[:-1]
    return roots


def principal_value_integral(space, curve: CurveSpec, f: Callable[[np.ndarray], np.ndarray],
                             tol: float = 1e-9, fold_floor: float = 1e-4) -> dict:
    """Integral of ``f(t) dt`` in the principal-value sense at roots of ``omega``.

    Around each root ``r`` the integrand is folded symmetrically,
    ``f(r + x) + f(r - x)`` on ``[0, delta]``, which cancels odd simple
    poles. Below ``fold_floor * delta`` the folded integrand is held
    constant: rounding in the root location feeds an ``O(eps / x^2)``
    error into the fold, and the horizontality test is unstable there. Closed curves are treated periodically.

    Returns:
        Dict with ``value``, ``roots`` and ``error``.
    """
    space = ModelSpaceId.parse(space)
    a, b = curve.domain
    period = b - a
    roots = _omega_roots(space, curve)

    def wrap(t):
        t = np.asarray(t, float)
        return a + np.mod(t - a, period) if curve.closed else t

    def g(t):
        return np.asarray(f(wrap(t)), float)

    if not roots:
        v, e = adaptive_simpson(g, a, b, tol)
        return {"value": v, "roots": [], "error": e}
    if curve.closed:
        ext = [roots[-1] - period] + roots + [roots[0] + period]
        start = 0.5 * (ext[0] + ext[1])
        stop = start + period
        pts = roots
    else:
        start, stop, pts = a, b, roots
    # half-width: half the gap to the neighbouring roots, capped by open endpoints
    segs = []
    for i, r in enumerate(pts):
        if curve.closed:
            prev = pts[i - 1] if i else pts[-1] - period
            nxt = pts[i + 1] if i + 1 < len(pts) else pts[0] + period
            delta = 0.5 * min(r - prev, nxt - r) if len(pts) > 1 else 0.5 * period
        else:
            gaps = [abs(r - q) / 2 for q in pts if q != r] + [r - a, b - r]
            delta = min(gaps)
        segs.append((r, delta))
    total, err = [], []
    cursor = start
    for r, delta in segs:
        if r - delta > cursor:
            v, e = adaptive_simpson(g, cursor, r - delta, tol / (2 * len(segs) + 1))
            total.append(v)
            err.append(e)
        if delta > 0:
            def folded(x, r=r, delta=delta):
                x = np.maximum(x, fold_floor * delta)
                return g(r + x) + g(r - x)

            v, e = adaptive_simpson(folded, 0.0, delta, tol / (2 * len(segs) + 1))
            total.append(v)
            err.append(e)
        cursor = r + delta
    if stop > cursor:
        v, e = adaptive_simpson(g, cursor, stop, tol / (2 * len(segs) + 1))
        total.append(v)
        err.append(e)
    return {"value": math.fsum(total), "roots": roots, "error": math.fsum(err)}


@dataclass(frozen=True)
class SurfaceIntegral:
    value: float
    error: float
    excluded_area: float
    excluded_fraction: float
    rectangles: int


def _flag_cells(chart: SurfaceChart, threshold: float, cells: int) -> np.ndarray:
    s0, s1, t0, t1 = chart.rect
    fs = np.linspace(0, 1, 2 * cells + 1)
    S, T = np.meshgrid(s0 + (s1 - s0) * fs, t0 + (t1 - t0) * fs, indexing="ij")
    flag = characteristic_report(chart.surface, chart.phi(S, T), threshold).is_characteristic
    out = np.zeros((cells, cells), bool)
    for di in range(3):
        for dj in range(3):
            out |= flag[di:di + 2 * cells:2, dj:dj + 2 * cells:2]
    return out


def _rectangles(flags: np.ndarray) -> list[tuple[int, int, int, int]]:
    """Cover the unflagged cells by disjoint index rectangles ``(i0, i1, j0, j1)``."""
    n, m = flags.shape
    runs_prev: dict[tuple[int, int], int] = {}
    rects = []
    for i in range(n + 1):
        runs = set()
        if i < n:
            j = 0
            while j < m:
                if flags[i, j]:
                    j += 1
                    continue
                k = j
                while k < m and not flags[i, k]:
                    k += 1
                runs.add((j, k))
                j = k
        nxt = {}
        for run, start in runs_prev.items():
            if run in runs:
                nxt[run] = start
            else:
                rects.append((start, i, run[0], run[1]))
        for run in runs:
            nxt.setdefault(run, i)
        runs_prev = nxt
    return sorted(rects)


def surface_integral(chart: SurfaceChart, integrand: Callable[[np.ndarray], np.ndarray] | None, kind,
                     L: float | None, tol: float = 1e-9, threshold: float = CHARACTERISTIC_THRESHOLD,
                     max_excluded_fraction: float = 0.05, scan_cells: int = SCAN_CELLS,
                     exclude: bool = True) -> SurfaceIntegral:
    """``int integrand d(kind)`` over the chart rectangle.

    ``integrand`` receives points of shape ``(n, 3)``. Cells of a
    ``scan_cells`` square grid containing characteristic points are removed
    and the rest is covered by rectangles, each integrated by nested
    adaptive Simpson.

    Raises:
        QuadratureError: if the excluded fraction exceeds the bound.
    """
    kind = MeasureKind(kind)
    s0, s1, t0, t1 = chart.rect
    if exclude:
        flags = _flag_cells(chart, threshold, scan_cells)
    else:
        flags = np.zeros((1, 1), bool)
    cells = flags.shape[0]
    frac = float(flags.mean())
    ds, dt = (s1 - s0) / cells, (t1 - t0) / cells
    excluded = frac * (s1 - s0) * (t1 - t0)
    if frac > max_excluded_fraction:
        raise QuadratureError(f"excluded area fraction {frac:.3f} exceeds {max_excluded_fraction}")
    rects = _rectangles(flags) if frac > 0 else [(0, cells, 0, cells)]
    total_area = (s1 - s0) * (t1 - t0)

    def density(s, t):
        dens = chart_density(chart, s, t, L, kind)
        if integrand is None:
            return dens
        return np.asarray(integrand(chart.phi(s, t)), float) * dens

    vals, errs = [], []
    for i0, i1, j0, j1 in rects:
        a_s, b_s = s0 + i0 * ds, s0 + i1 * ds
        a_t, b_t = t0 + j0 * dt, t0 + j1 * dt
        share = (b_s - a_s) * (b_t - a_t) / total_area
        rtol = tol * share
        inner_tol = rtol / (2 * (b_s - a_s))

        def outer(_idx, svals, a_t=a_t, b_t=b_t, inner_tol=inner_tol):
            n = svals.size
            v, _ = integrate_many(lambda k, t: density(svals[k], t), np.full(n, a_t), np.full(n, b_t), inner_tol)
            return v

        v, e = integrate_many(outer, [a_s], [b_s], rtol / 2)
        vals.append(float(v[0]))
        errs.append(float(e[0]))
    return SurfaceIntegral(math.fsum(vals), math.fsum(errs), excluded, frac, len(rects))


# ---------------------------------------------------------------------------
# Extrapolation

_BASES = {
    ExtrapolationModel.A_PLUS_B_OVER_SQRTL: [0.0, -0.5, -1.0, -1.5, -2.0],
    ExtrapolationModel.A_PLUS_B_OVER_L: [0.0, -1.0, -2.0, -3.0, -4.0],
    ExtrapolationModel.A_L_PLUS_B: [1.0, 0.0, -0.5, -1.0, -1.5],
}


def limit_extrapolate(samples: Sequence[tuple[float, object]], model, extra_terms: int = 0) -> dict:
    """Least-squares fit of samples ``(L, value)`` to an asymptotic model.

    The two named coefficients come first; ``extra_terms`` appends further
    powers of the model's step. Values may be arrays (fitted jointly).

    Returns:
        Dict with ``coefficients`` (leading axis over terms), ``powers`` and
        ``residual`` (max abs misfit).

    Raises:
        ExtrapolationError: with fewer than ``terms + 1`` distinct ``L``
            values or a rank-deficient design.
    """
    model = ExtrapolationModel(model)
    powers = _BASES[model][: 2 + extra_terms]
    if len(powers) < 2 + extra_terms:
        raise ExtrapolationError("too many extra terms for this model")
    Ls = np.array([float(s[0]) for s in samples])
    if np.unique(Ls).size != Ls.size:
        raise ExtrapolationError("duplicate L values")
    if Ls.size < len(powers) + 1:
        raise ExtrapolationError(f"need at least {len(powers) + 1} samples, got {Ls.size}")
    if np.any(Ls <= 0):
        raise ExtrapolationError("L values must be positive")
    Y = np.stack([np.asarray(s[1], float) for s in samples])
    shape = Y.shape[1:]
    Y = Y.reshape(Ls.size, -1)
    A = np.stack([Ls**p for p in powers], axis=1)
    scale = np.max(np.abs(A), axis=0)
    As = A / scale
    if np.linalg.matrix_rank(As) < len(powers):
        raise ExtrapolationError("singular design matrix")
    coef, *_ = np.linalg.lstsq(As, Y, rcond=None)
    coef = coef / scale[:, None]
    resid = float(np.max(np.abs(A @ coef - Y))) if Y.size else 0.0
    return {"coefficients": coef.reshape((len(powers),) + shape), "powers": powers, "residual": resid}
