"""Command-line entry point.

Subcommands ``tables``, ``curve``, ``surface``, ``gauss-bonnet`` and
``sweep``. Every flag may also come from a JSON config file (``--config``);
flags given on the command line win. Exit codes: 0 pass, 1 gate failure,
2 configuration or validation error.

Config schema (all keys optional)::

    {"command": "gauss-bonnet", "space": "affine", "dist": "h1",
     "param": [0.0], "L": [1, 4, 100], "fixture": "affine-x3-disk",
     "kind": "finite", "format": "json", "output": "report.json",
     "tolerances": {"gate": 1e-6}}
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import sympy as sp

from . import fixtures
from .connections import (
    LSYM,
    PARAM,
    ConnectionContext,
    DistributionKind,
    build_connection,
    compare_tables,
    connection_diagnostics,
    paper_curvature_table,
    paper_table,
    param_name,
    riemann_tensor,
    symbolic_connection,
    symbolic_riemann,
)
from .curves import curvature_finite_L, curvature_limit
from .errors import ConfigError, SrgbError
from .gauss_bonnet import (
    GBReport,
    _jsonable,
    finite_L_check,
    gb_sweep,
    limit_check_first_kind,
    limit_check_second_kind,
    sample_points,
)
from .model_spaces import BracketSource, ModelSpaceId, bracket_table, diff_bracket_tables
from .surfaces import (
    expansion_fit,
    gauss_sectional,
    surface_curvature_limits,
    surface_curvatures,
)

__all__ = ["RunConfig", "build_parser", "load_config", "run", "main"]

COMMANDS = ("tables", "curve", "surface", "gauss-bonnet", "sweep")
FORMATS = ("json", "csv", "text")
TABLE_GATE = 1e-12
SWEEP_GATE = 1e-6

DEFAULTS = {
    "space": "affine",
    "dist": "h1",
    "param": [0.0],
    "L": None,
    "fixture": None,
    "kind": "finite",
    "format": "json",
    "output": None,
    "tolerances": {},
}

DEFAULT_L = {
    "tables": [0.5, 1.0, 4.0, 100.0],
    "curve": [1e2, 1e4, 1e6, 1e8],
    "surface": [1.0, 4.0, 100.0],
    "gauss-bonnet": [1.0, 4.0, 100.0],
    "sweep": [1e2, 1e4, 1e6],
}


@dataclass
class RunConfig:
    """Validated run configuration."""

    command: str
    space: ModelSpaceId
    dist: DistributionKind
    param: list[float]
    L: list[float]
    fixture: str | None = None
    kind: str = "finite"
    format: str = "json"
    output: str | None = None
    tolerances: dict = field(default_factory=dict)

    def gate(self, default: float) -> float:
        return float(self.tolerances.get("gate", default))


def _float_list(value) -> list[float]:
    if value is None:
        return []
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        items = [v for v in value.split(",") if v.strip()]
    else:
        items = list(value)
    try:
        return [float(v) for v in items]
    except (TypeError, ValueError):
        raise ConfigError(f"cannot read {value!r} as a list of numbers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srgb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--space", choices=[m.value for m in ModelSpaceId])
        p.add_argument("--dist", choices=[d.value for d in DistributionKind])
        p.add_argument("--param", help="comma-separated deformation parameters")
        p.add_argument("--L", dest="L", help="comma-separated L values")
        p.add_argument("--fixture", help="fixture name")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--tol", type=float, help="override the pass/fail gate")
        if name == "gauss-bonnet":
            p.add_argument("--kind", choices=["finite", "limit"])
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional JSON config and command-line flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if data.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {data['command']!r}, not {args.command!r}")
        merged.update({k: v for k, v in data.items() if k != "command"})
    for key in ("space", "dist", "param", "L", "fixture", "kind", "format", "output"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    tolerances = dict(merged.get("tolerances") or {})
    if getattr(args, "tol", None) is not None:
        tolerances["gate"] = args.tol

    command = args.command
    try:
        space = ModelSpaceId.parse(merged["space"])
        dist = DistributionKind.parse(merged["dist"])
    except (ValueError, SrgbError) as exc:
        raise ConfigError(str(exc)) from None
    params = _float_list(merged["param"])
    Ls = _float_list(merged["L"]) or list(DEFAULT_L[command])
    if not params:
        raise ConfigError("param list is empty")
    if any(not math.isfinite(L) or L <= 0 for L in Ls):
        raise ConfigError("L values must be positive and finite")
    if merged["format"] not in FORMATS:
        raise ConfigError(f"unknown format {merged['format']!r}")
    if merged["format"] == "text" and command != "tables":
        raise ConfigError("text output is only available for tables")
    if merged["kind"] not in ("finite", "limit"):
        raise ConfigError(f"unknown kind {merged['kind']!r}")
    if command != "tables" and not merged["fixture"]:
        raise ConfigError(f"{command} needs --fixture")
    return RunConfig(command, space, dist, params, Ls, merged["fixture"], merged["kind"], merged["format"],
                     merged["output"], tolerances)


# ---------------------------------------------------------------------------
# Commands. Each returns (report dict, csv rows, passed flag or None).

def _cmd_tables(cfg: RunConfig):
    space, dist = cfg.space, cfg.dist
    gate = cfg.gate(TABLE_GATE)
    brackets = diff_bracket_tables(bracket_table(space, BracketSource.COORDINATE_DERIVED),
                                   bracket_table(space, BracketSource.PAPER_TABLE))
    conn_diff = compare_tables(symbolic_connection(space, dist).gamma, paper_table(space, dist).gamma, "entry")
    curv_diff = compare_tables(symbolic_riemann(space, dist), paper_curvature_table(space, dist), "entry")
    printed = paper_table(space, dist)
    grid, rows, passed = [], [], True
    brk = bracket_table(space).c
    curv_ref = sp.lambdify((PARAM, LSYM), paper_curvature_table(space, dist).tolist(), "numpy")
    for a in cfg.param:
        for L in cfg.L:
            table = build_connection(space, dist, a, L)
            ref = printed.numeric(a, L).gamma
            diag = connection_diagnostics(table, L)
            R = riemann_tensor(table.gamma, brk)
            R_ref = np.array(curv_ref(a, L), dtype=float)
            entry = {
                "param": a,
                "L": L,
                "gamma": table.gamma,
                "max_table_difference": float(np.max(np.abs(table.gamma - ref))),
                "max_curvature_difference": float(np.max(np.abs(R - R_ref))),
                "metric_defect": diag["metric_defect"],
                "max_torsion": float(np.max(np.abs(diag["torsion"]))),
            }
            passed &= entry["metric_defect"] < gate
            grid.append(entry)
            for i in range(3):
                for j in range(3):
                    rows.append({"param": a, "L": L, "i": i + 1, "j": j + 1,
                                 **{f"X{k + 1}": table.gamma[i, j, k] for k in range(3)},
                                 **{f"printed_X{k + 1}": ref[i, j, k] for k in range(3)}})
    report = {
        "command": "tables",
        "space": space.value,
        "dist": dist.value,
        "param_name": param_name(space),
        "bracket_discrepancies": brackets,
        "connection_discrepancies": conn_diff,
        "curvature_discrepancies": curv_diff,
        "grid": grid,
        "gate": gate,
        "passed": passed,
    }
    return report, rows, passed


def _cmd_curve(cfg: RunConfig):
    fx = fixtures.curve(cfg.fixture)
    t = np.array([fx.t])
    rows, limits = [], []
    for a in cfg.param:
        lim = curvature_limit(fx.space, cfg.dist, a, fx.curve, t).first()
        limits.append({"param": a, **lim})
        for L in cfg.L:
            k = float(curvature_finite_L(ConnectionContext.build(fx.space, cfg.dist, a, L), fx.curve, t)[0])
            rows.append({"param": a, "L": L, "t": fx.t, "k_L": k, "k_L_over_sqrtL": k / math.sqrt(L),
                         "k_inf": lim["value"], "class": lim["class"], "scaling": lim["scaling"]})
    report = {"command": "curve", "fixture": cfg.fixture, "space": fx.space.value, "dist": cfg.dist.value,
              "param_name": param_name(fx.space), "t": fx.t, "rows": rows, "limits": limits}
    return report, rows, None


def _cmd_surface(cfg: RunConfig):
    if cfg.fixture in fixtures.SURFACE_CURVES:
        surf, fx = fixtures.surface_curve(cfg.fixture)
        t = np.array([fx.t])
        rows, limits = [], []
        for a in cfg.param:
            lim = surface_curvature_limits(fx.space, cfg.dist, a, surf, fx.curve, t)
            limits.append({"param": a, "class": str(lim["class"][0]), "k_inf": float(lim["k_inf"][0]),
                           "k_inf_signed": float(lim["k_inf_signed"][0])})
            for L in cfg.L:
                k = surface_curvatures(ConnectionContext.build(fx.space, cfg.dist, a, L), surf, fx.curve, t)
                rows.append({"param": a, "L": L, "t": fx.t, "k_L": float(k["k_L"][0]),
                             "k_L_signed": float(k["k_L_signed"][0])})
        report = {"command": "surface", "fixture": cfg.fixture, "space": fx.space.value, "dist": cfg.dist.value,
                  "param_name": param_name(fx.space), "rows": rows, "limits": limits}
        return report, rows, None
    sc = fixtures.scenario(cfg.fixture)
    pts = sample_points(sc.chart, 3)
    rows, fits = [], []
    for a in cfg.param:
        fit = expansion_fit(sc.space, cfg.dist, a, sc.surface, pts)
        fits.append({"param": a, "points": pts, "c_lead": fit.c_lead, "c_0": fit.c_0,
                     "fit_residual": fit.fit_residual})
        for L in cfg.L:
            g = gauss_sectional(ConnectionContext.build(sc.space, cfg.dist, a, L), sc.surface, pts)
            for n, p in enumerate(pts):
                rows.append({"param": a, "L": L, "point": n, "x1": p[0], "x2": p[1], "x3": p[2],
                             "K_amb": float(g["K_amb"][n]), "det_II": float(g["det_II"][n]),
                             "K_sigma": float(g["K_sigma"][n])})
    report = {"command": "surface", "fixture": cfg.fixture, "space": sc.space.value, "dist": cfg.dist.value,
              "param_name": param_name(sc.space), "rows": rows, "expansion": fits}
    return report, rows, None


def _report_row(r: GBReport) -> dict:
    return {"kind": r.kind, "scenario": r.scenario, "dist": r.dist, "param": r.param,
            "L": "" if r.L is None else r.L, "interior": r.interior, "boundary": r.boundary,
            "target": r.target, "residual": r.residual, "passed": "" if r.passed is None else r.passed}


def _cmd_gauss_bonnet(cfg: RunConfig):
    base = fixtures.scenario(cfg.fixture)
    reports: list[GBReport] = []
    for a in cfg.param:
        sc = base.with_params(dist=cfg.dist, param=a, L_grid=cfg.L)
        if cfg.kind == "finite":
            gate = cfg.tolerances.get("gate")
            for L in cfg.L:
                reports.append(finite_L_check(sc, L) if gate is None else finite_L_check(sc, L, gate=float(gate)))
        else:
            check = limit_check_first_kind if cfg.dist is DistributionKind.H1 else limit_check_second_kind
            gate = cfg.tolerances.get("gate")
            reports.append(check(sc) if gate is None else check(sc, gate=float(gate)))
    flags = [r.passed for r in reports if r.passed is not None]
    flags += [r.details["lead_candidate_passed"] for r in reports if "lead_candidate_passed" in r.details]
    passed = all(flags) if flags else None
    report = {"command": "gauss-bonnet", "fixture": cfg.fixture, "kind": cfg.kind,
              "reports": [r.to_dict() for r in reports], "passed": passed}
    return report, [_report_row(r) for r in reports], passed


def _cmd_sweep(cfg: RunConfig):
    base = fixtures.scenario(cfg.fixture)
    gate = cfg.gate(SWEEP_GATE)
    sweeps, rows, passed = [], [], True
    for a in cfg.param:
        out = gb_sweep(base.with_params(dist=cfg.dist, param=a), cfg.L)
        lim = out["extrapolated_limit"]
        ok = lim is not None and abs(lim) < gate
        passed &= ok
        sweeps.append({"param": a, "slope": out["slope"], "extrapolated_limit": lim,
                       "fit_residual": out.get("fit_residual"), "passed": ok,
                       "reports": [r.to_dict() for r in out["reports"]]})
        for r in out["reports"]:
            rows.append({**_report_row(r), "normalized_total": r.details["normalized_total"]})
    report = {"command": "sweep", "fixture": cfg.fixture, "gate": gate, "sweeps": sweeps, "passed": passed}
    return report, rows, passed


HANDLERS = {
    "tables": _cmd_tables,
    "curve": _cmd_curve,
    "surface": _cmd_surface,
    "gauss-bonnet": _cmd_gauss_bonnet,
    "sweep": _cmd_sweep,
}


# ---------------------------------------------------------------------------
# Output

def to_json(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    fieldnames: list[str] = []
    for row in rows:
        fieldnames += [k for k in row if k not in fieldnames]
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
    return buf.getvalue()


def to_text(report: dict) -> str:
    lines = [f"{report['space']} {report['dist']} ({report['param_name']})"]
    for entry in report["grid"]:
        lines.append(f"\n{report['param_name']} = {entry['param']:g}, L = {entry['L']:g}")
        for i in range(3):
            for j in range(3):
                vec = "  ".join(f"{v:>12.6g}" for v in entry["gamma"][i, j])
                lines.append(f"  nabla_X{i + 1} X{j + 1} = {vec}")
        lines.append(f"  max |table - printed| = {entry['max_table_difference']:.3e}"
                     f"   metric defect = {entry['metric_defect']:.3e}")
    for key in ("bracket_discrepancies", "connection_discrepancies", "curvature_discrepancies"):
        lines.append(f"\n{key}: {len(report[key])}")
        lines += [f"  {json.dumps(_jsonable(d), sort_keys=True)}" for d in report[key]]
    return "\n".join(lines) + "\n"


def render(cfg: RunConfig, report: dict, rows: Sequence[dict]) -> str:
    if cfg.format == "csv":
        return to_csv(rows)
    if cfg.format == "text":
        return to_text(report)
    return to_json(report)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a validated config; returns the exit code and rendered output."""
    report, rows, passed = HANDLERS[cfg.command](cfg)
    text = render(cfg, report, rows)
    return (1 if passed is False else 0), text


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        cfg = load_config(args)
        code, text = run(cfg)
    except SrgbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
