"""Gauss-Bonnet identities at finite ``L`` and in the sub-Riemannian limit."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .connections import ConnectionContext, DistributionKind, param_name
from .curves import CurveSpec, frame_velocity
from .errors import ConfigError, OffSurfaceError
from .model_spaces import ModelSpaceId
from .quadrature import (
    ExtrapolationModel,
    MeasureKind,
    SurfaceChart,
    adaptive_simpson,
    curve_density,
    limit_extrapolate,
    principal_value_integral,
    surface_integral,
)
from .surfaces import (
    DEFAULT_EXPANSION_GRID,
    adapted_frame,
    expansion_fit,
    gauss_sectional,
    leading_candidates,
    printed_constant_term,
    surface_curvature_limits,
    surface_curvatures,
)

__all__ = [
    "GBScenario",
    "GBReport",
    "validate_scenario",
    "finite_L_check",
    "limit_check_first_kind",
    "limit_check_second_kind",
    "gb_sweep",
    "worker_count",
    "sample_points",
    "CLOSED_TOL",
]

CLOSED_TOL = 1e-9
FINITE_GATE = 1e-6
FIRST_KIND_GATE = 1e-6
LEAD_CANDIDATE_GATE = 1e-4
SECOND_KIND_GATE = 1e-3


@dataclass(frozen=True)
class GBScenario:
    """A surface piece with boundary, ready for Gauss-Bonnet checks.

    Attributes:
        chart: Parametrization of the region.
        boundary: Closed boundary curves, oriented for the finite-L check.
        euler_char: Euler characteristic of the region.
        analytic_area: Closed-form value of ``int dSigma`` when known.
    """

    name: str
    space: ModelSpaceId
    chart: SurfaceChart
    boundary: tuple[CurveSpec, ...]
    euler_char: int = 1
    dist: DistributionKind = DistributionKind.H1
    param: float = 0.0
    L_grid: tuple[float, ...] = (1.0, 4.0, 100.0)
    analytic_area: float | None = None

    @property
    def surface(self):
        return self.chart.surface

    def with_params(self, dist=None, param=None, L_grid=None, euler_char=None) -> "GBScenario":
        return replace(
            self,
            dist=self.dist if dist is None else DistributionKind.parse(dist),
            param=self.param if param is None else float(param),
            L_grid=self.L_grid if L_grid is None else tuple(float(x) for x in L_grid),
            euler_char=self.euler_char if euler_char is None else int(euler_char),
        )


def validate_scenario(sc: GBScenario, n: int = 64) -> None:
    """Raise ``ConfigError`` for an empty or open boundary, or a curve off the surface."""
    if not sc.boundary:
        raise ConfigError("scenario has no boundary; closed surfaces are not supported")
    for curve in sc.boundary:
        a, b = curve.domain
        ga, _, _ = curve.eval(np.array([a]))
        gb, _, _ = curve.eval(np.array([b]))
        if np.max(np.abs(ga - gb)) > CLOSED_TOL:
            raise ConfigError(f"boundary curve {curve.name} is not closed")
        g, _, _ = curve.eval(np.linspace(a, b, n))
        if np.max(np.abs(sc.surface.u(g))) >= 1e-9:
            raise ConfigError(f"boundary curve {curve.name} leaves the surface")
    try:
        sc.chart.validate()
    except OffSurfaceError as exc:
        raise ConfigError(str(exc)) from exc
    if any(L <= 0 for L in sc.L_grid):
        raise ConfigError("L values must be positive")


@dataclass
class GBReport:
    """Result of one Gauss-Bonnet check. ``residual = interior + boundary - target``."""

    kind: str
    scenario: str
    space: str
    dist: str
    param: float
    L: float | None
    interior: float
    boundary: float
    target: float
    residual: float
    gate: float | None
    passed: bool | None
    excluded_area: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _boundary_integral(sc: GBScenario, density, tol: float) -> float:
    total = []
    for curve in sc.boundary:
        a, b = curve.domain
        total.append(adaptive_simpson(density(curve), a, b, tol / len(sc.boundary))[0])
    return math.fsum(total)


def finite_L_check(sc: GBScenario, L: float, tol: float | None = None, gate: float = FINITE_GATE) -> GBReport:
    """``int K^Sigma dSigma_L + sum int k^{L,s} ds_L - 2 pi chi`` at one ``L``.

    The pass flag is gated only for the Levi-Civita case (parameter 0);
    otherwise the residual is recorded without a verdict.
    """
    validate_scenario(sc)
    ctx = ConnectionContext.build(sc.space, sc.dist, sc.param, L)
    tol = 1e-9 * max(1.0, math.sqrt(L)) if tol is None else tol
    interior = surface_integral(sc.chart, lambda p: gauss_sectional(ctx, sc.surface, p)["K_sigma"],
                                MeasureKind.DSIGMA_L, L, tol=tol)

    def density(curve):
        def f(t):
            k = surface_curvatures(ctx, sc.surface, curve, t)["k_L_signed"]
            return k * curve_density(sc.space, curve, t, L, MeasureKind.DS_L)
        return f

    boundary = _boundary_integral(sc, density, tol)
    target = 2 * math.pi * sc.euler_char
    residual = interior.value + boundary - target
    gated = sc.param == 0.0
    return GBReport(
        "finite_L", sc.name, sc.space.value, sc.dist.value, sc.param, float(L), interior.value, boundary, target,
        residual, gate if gated else None, bool(abs(residual) < gate) if gated else None, interior.excluded_area,
        {"normalized_total": (interior.value + boundary) / math.sqrt(L), "quadrature_tol": tol},
    )


def _limit_boundary_density(sc: GBScenario, measure: MeasureKind, sign_source: str = "constructed"):
    """Boundary integrand ``k^{inf,s}`` times the ``ds`` or ``dsBar`` density.

    Inside quadrature the sign is taken from the constructed limit: the
    finite-``L`` sign flips within ``O(L^{-1/2})`` of horizontal points
    while ``k^{inf,s} ds`` stays of order one there.
    """
    def density(curve):
        def f(t):
            lim = surface_curvature_limits(sc.space, sc.dist, sc.param, sc.surface, curve, t)
            if sign_source == "finite_L":
                k = lim["k_inf_signed"]
            else:
                # printed magnitude, sign of the constructed limit
                k = np.sign(lim["k_inf_signed_constructed"]) * lim["k_inf"]
            nonh = lim["class"] == "NonHorizontal"
            g, gd, gdd = curve.eval(t)
            c, _ = frame_velocity(sc.space, g, gd, gdd)
            w = np.abs(c[..., 2])
            if measure is MeasureKind.DS:
                dens = w
            else:
                with np.errstate(divide="ignore", invalid="ignore"):
                    dens = (c[..., 0] ** 2 + c[..., 1] ** 2) / (2 * w)
            return np.where(nonh & (w > 0), k * dens, 0.0)
        return f
    return density


def _first_kind_boundary(sc: GBScenario, tol: float) -> float:
    return _boundary_integral(sc, _limit_boundary_density(sc, MeasureKind.DS), tol)


def limit_check_first_kind(sc: GBScenario, tol: float = 1e-9, gate: float = FIRST_KIND_GATE,
                           expansion_grid: Sequence[float] = DEFAULT_EXPANSION_GRID) -> GBReport:
    """Limit identity ``int K^{Sigma,inf} dSigma + sum int k^{inf,s} ds = 0``.

    Two interior integrands are used: the printed constant term and the
    fitted ``c_0`` of the ``K^Sigma`` expansion. ``residual`` is the printed
    one; the fitted residual sits in ``details``.
    """
    validate_scenario(sc)
    if sc.dist is not DistributionKind.H1:
        raise ConfigError("first-kind limit check needs the first distribution")

    def printed(p):
        return printed_constant_term(sc.space, sc.dist, sc.param, adapted_frame(sc.surface, p, 1.0))

    def fitted(p):
        return expansion_fit(sc.space, sc.dist, sc.param, sc.surface, p, expansion_grid).c_0

    int_printed = surface_integral(sc.chart, printed, MeasureKind.DSIGMA, None, tol=tol)
    int_fitted = surface_integral(sc.chart, fitted, MeasureKind.DSIGMA, None, tol=tol)
    area = surface_integral(sc.chart, None, MeasureKind.DSIGMA, None, tol=tol).value
    boundary = _first_kind_boundary(sc, tol)
    res_p = int_printed.value + boundary
    res_f = int_fitted.value + boundary
    details = {
        "interior_fitted": int_fitted.value,
        "residual_fitted": res_f,
        "passed_fitted": bool(abs(res_f) < gate),
        "area_dSigma": area,
        "area_analytic": sc.analytic_area,
        "area_delta": None if sc.analytic_area is None else area - sc.analytic_area,
        "param_name": param_name(sc.space),
    }
    return GBReport("limit_first_kind", sc.name, sc.space.value, sc.dist.value, sc.param, None, int_printed.value,
                    boundary, 0.0, res_p, gate, bool(abs(res_p) < gate), int_printed.excluded_area, details)


def sample_points(chart: SurfaceChart, n: int = 5) -> np.ndarray:
    """Cell-centred ``n x n`` grid of chart points, shape ``(n*n, 3)``."""
    s0, s1, t0, t1 = chart.rect
    fs = (np.arange(n) + 0.5) / n
    S, T = np.meshgrid(s0 + (s1 - s0) * fs, t0 + (t1 - t0) * fs, indexing="ij")
    return chart.phi(S.ravel(), T.ravel())


def limit_check_second_kind(sc: GBScenario, tol: float = 1e-8, gate: float = SECOND_KIND_GATE,
                            lead_gate: float = LEAD_CANDIDATE_GATE,
                            expansion_grid: Sequence[float] = DEFAULT_EXPANSION_GRID) -> GBReport:
    """Leading-order and constant-order limit identities for the second distribution.

    (a) The fitted leading coefficient is compared pointwise with each
    printed candidate; the closest is named and gated. Its integral
    against ``dSigma`` is the leading-identity residual.

    (b) The constant-order residual
    ``-int lead dSigmaBar + int B dSigma + sum PV int k^{inf,s} dsBar``
    uses the printed identity integrand. A variant with fitted
    coefficients and one with ``ds`` in place of ``dsBar`` are reported
    as diagnostics, together with ``residual_order_sqrtL``, the
    ``sqrt(L)`` coefficient of the finite-``L`` Gauss-Bonnet sum.
    """
    validate_scenario(sc)
    if sc.dist is not DistributionKind.H2:
        raise ConfigError("second-kind limit check needs the second distribution")
    space, dist, a = sc.space, sc.dist, sc.param

    pts = sample_points(sc.chart)
    fit = expansion_fit(space, dist, a, sc.surface, pts, expansion_grid)
    fr = adapted_frame(sc.surface, pts, 1.0)
    cands = leading_candidates(space, dist, a, fr)
    deviations = {k: float(np.max(np.abs(fit.c_lead - v))) for k, v in cands.items()}
    best = min(sorted(deviations), key=lambda k: deviations[k])

    def lead_fitted(p):
        return expansion_fit(space, dist, a, sc.surface, p, expansion_grid).c_lead

    def c0_fitted(p):
        return expansion_fit(space, dist, a, sc.surface, p, expansion_grid).c_0

    def lead_identity(p):
        return leading_candidates(space, dist, a, adapted_frame(sc.surface, p, 1.0))["identity"]

    def const_printed(p):
        return printed_constant_term(space, dist, a, adapted_frame(sc.surface, p, 1.0))

    lead_int = surface_integral(sc.chart, lead_fitted, MeasureKind.DSIGMA, None, tol=tol)
    lead_identity_int = surface_integral(sc.chart, lead_identity, MeasureKind.DSIGMA, None, tol=tol).value
    lead_bar = surface_integral(sc.chart, lead_identity, MeasureKind.DSIGMA_BAR, None, tol=tol).value
    lead_fit_bar = surface_integral(sc.chart, lead_fitted, MeasureKind.DSIGMA_BAR, None, tol=tol).value
    const_int = surface_integral(sc.chart, const_printed, MeasureKind.DSIGMA, None, tol=tol)
    c0_int = surface_integral(sc.chart, c0_fitted, MeasureKind.DSIGMA, None, tol=tol).value

    pv_parts, roots = [], []
    for curve in sc.boundary:
        f = _limit_boundary_density(sc, MeasureKind.DS_BAR, sign_source="constructed")(curve)
        pv = principal_value_integral(space, curve, f, tol=tol)
        pv_parts.append(pv["value"])
        roots.append(pv["roots"])
    boundary_bar = math.fsum(pv_parts)
    boundary_ds = _first_kind_boundary(sc, tol)

    residual = -lead_bar + const_int.value + boundary_bar
    details = {
        "lead_fitted_integral": lead_int.value,
        "lead_identity_integral": lead_identity_int,
        "lead_candidate_deviation": deviations,
        "lead_best_candidate": best,
        "lead_best_deviation": deviations[best],
        "lead_candidate_passed": bool(deviations[best] < lead_gate),
        "lead_residual": lead_int.value,
        "lead_residual_passed": bool(abs(lead_int.value) < 1e-9),
        "lead_fitted_max_abs": float(np.max(np.abs(fit.c_lead))),
        "lead_dSigmaBar_integral": lead_bar,
        "constant_interior_printed": const_int.value,
        "constant_interior_fitted": c0_int,
        "boundary_dsBar_pv": boundary_bar,
        "boundary_ds": boundary_ds,
        "horizontal_roots": roots,
        "residual_fitted": -lead_fit_bar + c0_int + boundary_bar,
        "residual_ds_variant": const_int.value + boundary_ds,
        "residual_fitted_ds_variant": c0_int + boundary_ds,
        # order sqrt(L) term of int K dSigma_L + sum int k ds_L
        "residual_order_sqrtL": lead_fit_bar + c0_int + boundary_ds,
        "param_name": param_name(space),
    }
    return GBReport("limit_second_kind", sc.name, space.value, dist.value, a, None, const_int.value - lead_bar,
                    boundary_bar, 0.0, residual, gate, bool(abs(residual) < gate), const_int.excluded_area, details)


def worker_count() -> int:
    """Worker cap from ``SRGB_THREADS`` (default 1)."""
    raw = os.environ.get("SRGB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"SRGB_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def gb_sweep(sc: GBScenario, L_grid: Sequence[float] | None = None) -> dict:
    """Finite-``L`` reports over a grid plus the fitted asymptotics.

    The normalized total ``(interior + boundary) / sqrt(L)`` equals
    ``2 pi chi / sqrt(L)`` when the identity holds; its log-log slope and
    its extrapolated ``L -> infinity`` value are reported.
    """
    validate_scenario(sc)
    grid = tuple(sorted(float(x) for x in (L_grid or sc.L_grid)))
    workers = min(worker_count(), len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda L: finite_L_check(sc, L), grid))
    else:
        reports = [finite_L_check(sc, L) for L in grid]
    norm = np.array([r.details["normalized_total"] for r in reports])
    Ls = np.array(grid)
    out = {"reports": reports, "slope": None, "extrapolated_limit": None, "limit_residual": None}
    if len(grid) >= 2 and np.all(np.abs(norm) > 0):
        out["slope"] = float(np.polyfit(np.log(Ls), np.log(np.abs(norm)), 1)[0])
    if len(grid) >= 3:
        fit = limit_extrapolate(list(zip(Ls, norm)), ExtrapolationModel.A_PLUS_B_OVER_SQRTL)
        A = float(fit["coefficients"][0])
        out["extrapolated_limit"] = A
        out["limit_residual"] = A
        out["fit_residual"] = fit["residual"]
    return out
