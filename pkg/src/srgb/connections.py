"""Connections on the model groups built from the Koszul formula.

The chain is: Levi-Civita connection of ``g_L`` (Koszul) -> Schouten-Van
Kampen projection onto a distribution -> affine blend with parameter
``param``. All connections are left-invariant, so a connection is a constant
table ``gamma[i, j, k]`` with ``nabla_{Xi} Xj = sum_k gamma[i, j, k] Xk``.

Tables can be built over floats or over sympy expressions in ``(param, L)``;
the symbolic tables are used for exact comparison against reference tables
and for splitting a table into its ``L``, ``1`` and ``1/L`` parts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import ParameterError
from .model_spaces import BracketSource, BracketTable, ModelSpaceId, bracket_table, metric_diag

__all__ = [
    "DistributionKind",
    "ConnectionTable",
    "ConnectionContext",
    "PARAM",
    "LSYM",
    "koszul_levi_civita",
    "svk_connection",
    "deform",
    "build_connection",
    "paper_table",
    "covariant_derivative",
    "connection_diagnostics",
    "riemann_tensor",
    "paper_curvature_table",
    "symbolic_connection",
    "symbolic_riemann",
    "laurent_split",
    "compare_tables",
    "param_name",
]

PARAM, LSYM = sp.symbols("param L", real=True)


class DistributionKind(str, enum.Enum):
    """Horizontal distribution: ``H1 = span{X1, X2}`` or ``H2 = span{X2, X3}``."""

    H1 = "h1"
    H2 = "h2"

    @classmethod
    def parse(cls, value: "str | DistributionKind") -> "DistributionKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown distribution {value!r}") from None

    @property
    def horizontal(self) -> tuple[int, ...]:
        return (0, 1) if self is DistributionKind.H1 else (1, 2)

    @property
    def complement(self) -> tuple[int, ...]:
        return (2,) if self is DistributionKind.H1 else (0,)

    def projector(self) -> np.ndarray:
        mask = np.zeros(3)
        mask[list(self.horizontal)] = 1.0
        return mask


def param_name(space: ModelSpaceId) -> str:
    """Conventional name of the deformation parameter in reports."""
    return "alpha" if ModelSpaceId.parse(space) is ModelSpaceId.AFFINE else "beta"


@dataclass(frozen=True)
class ConnectionTable:
    """Constant connection coefficients ``gamma[i, j] = nabla_{Xi} Xj``.

    ``gamma`` has shape ``(3, 3, 3)``; the dtype is float for numeric tables
    and object (sympy) for symbolic ones.
    """

    space: ModelSpaceId
    gamma: np.ndarray
    provenance: str
    L: object = None
    dist: DistributionKind | None = None
    param: object = None

    def __post_init__(self):
        self.gamma.setflags(write=False)

    @property
    def is_symbolic(self) -> bool:
        return self.gamma.dtype == object

    def numeric(self, param: float | None = None, L: float | None = None) -> "ConnectionTable":
        """Evaluate a symbolic table at concrete ``(param, L)``."""
        if not self.is_symbolic:
            return self
        subs = {}
        if param is not None:
            subs[PARAM] = param
        if L is not None:
            subs[LSYM] = L
        g = np.array([[[float(sp.sympify(e).subs(subs)) for e in row] for row in blk] for blk in self.gamma])
        return ConnectionTable(self.space, g, self.provenance, L if L is not None else self.L, self.dist,
                               param if param is not None else self.param)


def _check_L(L) -> None:
    if isinstance(L, sp.Basic):
        return
    if not np.isfinite(L) or L <= 0:
        raise ParameterError(f"L must be positive, got {L!r}")


def _metric(L) -> list:
    if isinstance(L, sp.Basic):
        return [sp.Integer(1), sp.Integer(1), L]
    return list(metric_diag(L))


def koszul_levi_civita(space: ModelSpaceId, L, brackets: BracketTable | None = None) -> ConnectionTable:
    """Levi-Civita connection of ``g_L`` from the Koszul formula.

    With constant frame inner products,
    ``2<nabla_i X_j, X_k> = <[Xi,Xj],Xk> - <[Xj,Xk],Xi> + <[Xk,Xi],Xj>``.

    Args:
        space: Model group.
        L: Positive float, or a sympy symbol for an exact table.
        brackets: Structure constants; defaults to the coordinate-derived table.
    """
    space = ModelSpaceId.parse(space)
    _check_L(L)
    if brackets is None:
        brackets = bracket_table(space, BracketSource.COORDINATE_DERIVED)
    symbolic = isinstance(L, sp.Basic)
    c = brackets.exact if symbolic else brackets.c
    g = _metric(L)
    gamma = np.empty((3, 3, 3), dtype=object if symbolic else float)
    half = sp.Rational(1, 2) if symbolic else 0.5
    for i in range(3):
        for j in range(3):
            for k in range(3):
                val = half * (c[i, j, k] * g[k] - c[j, k, i] * g[i] + c[k, i, j] * g[j]) / g[k]
                gamma[i, j, k] = sp.simplify(val) if symbolic else val
    return ConnectionTable(space, gamma, "koszul", L=L)


def svk_connection(base: ConnectionTable, dist: DistributionKind) -> ConnectionTable:
    """Schouten-Van Kampen connection of ``base`` for a distribution.

    For ``Xj`` in the distribution only the horizontal part of
    ``nabla_{Xi} Xj`` is kept; for ``Xj`` in the complement only the
    complementary part.
    """
    dist = DistributionKind.parse(dist)
    mask = dist.projector()
    gamma = base.gamma.copy()
    for j in range(3):
        keep = mask if j in dist.horizontal else 1.0 - mask
        for i in range(3):
            for k in range(3):
                if keep[k] == 0.0:
                    gamma[i, j, k] = sp.Integer(0) if base.is_symbolic else 0.0
    return ConnectionTable(base.space, gamma, "svk", L=base.L, dist=dist)


def deform(lc: ConnectionTable, svk: ConnectionTable, param) -> ConnectionTable:
    """Blend ``(1 - param) * lc + param * svk`` entrywise."""
    if lc.space is not svk.space:
        raise ParameterError("tables belong to different spaces")
    if lc.L is not svk.L and lc.L != svk.L:
        raise ParameterError("tables use different L")
    if isinstance(param, sp.Basic) or lc.is_symbolic:
        gamma = np.empty((3, 3, 3), dtype=object)
        for idx in np.ndindex(3, 3, 3):
            gamma[idx] = sp.expand((1 - param) * lc.gamma[idx] + param * svk.gamma[idx])
    else:
        gamma = (1.0 - param) * lc.gamma + param * svk.gamma
    return ConnectionTable(lc.space, gamma, "deformed", L=lc.L, dist=svk.dist, param=param)


def build_connection(space: ModelSpaceId, dist: DistributionKind, param: float, L: float) -> ConnectionTable:
    """Numeric deformed connection using coordinate-derived brackets."""
    space = ModelSpaceId.parse(space)
    lc = koszul_levi_civita(space, float(L))
    return deform(lc, svk_connection(lc, dist), float(param))


@lru_cache(maxsize=None)
def symbolic_connection(space: ModelSpaceId, dist: DistributionKind) -> ConnectionTable:
    """Exact deformed table in the symbols ``PARAM`` and ``LSYM``."""
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    lc = koszul_levi_civita(space, LSYM)
    return deform(lc, svk_connection(lc, dist), PARAM)


@lru_cache(maxsize=None)
def _laurent_funcs(space: ModelSpaceId, dist: DistributionKind):
    table = symbolic_connection(space, dist)
    parts = []
    for power in (1, 0, -1):
        arr = []
        for idx in np.ndindex(3, 3, 3):
            expr = sp.expand(table.gamma[idx] * LSYM)
            poly = sp.Poly(expr, LSYM)
            arr.append(poly.coeff_monomial(LSYM ** (power + 1)))
        parts.append(sp.lambdify(PARAM, sp.Matrix(arr), "numpy"))
    return parts


def laurent_split(space: ModelSpaceId, dist: DistributionKind, param: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split the deformed table as ``L * G1 + G0 + G_{-1} / L``.

    Returns:
        The three ``(3, 3, 3)`` coefficient arrays ``(G1, G0, Gm1)``.
    """
    funcs = _laurent_funcs(ModelSpaceId.parse(space), DistributionKind.parse(dist))
    return tuple(np.asarray(f(float(param)), dtype=float).reshape(3, 3, 3) for f in funcs)


@dataclass(frozen=True)
class ConnectionContext:
    """A deformed connection together with the data that produced it."""

    space: ModelSpaceId
    dist: DistributionKind
    param: float
    L: float
    table: ConnectionTable
    brackets: BracketTable

    @classmethod
    def build(cls, space, dist, param: float, L: float) -> "ConnectionContext":
        space = ModelSpaceId.parse(space)
        dist = DistributionKind.parse(dist)
        _check_L(L)
        return cls(space, dist, float(param), float(L), build_connection(space, dist, param, L),
                   bracket_table(space, BracketSource.COORDINATE_DERIVED))

    @property
    def gamma(self) -> np.ndarray:
        return self.table.gamma

    @property
    def g(self) -> np.ndarray:
        return metric_diag(self.L)


def covariant_derivative(table: ConnectionTable, coeffs, direction, coeff_derivs) -> np.ndarray:
    """Covariant derivative of a field with frame coefficients ``coeffs``.

    Args:
        table: Connection coefficients.
        coeffs: Field coefficients at the point, shape ``(..., 3)``.
        direction: Direction vector in frame coefficients, shape ``(..., 3)``.
        coeff_derivs: Derivatives of ``coeffs`` along ``direction``.

    Returns:
        ``sum_j d(coeff_j) Xj + sum_ij direction_i coeff_j gamma[i, j]``.
    """
    coeffs = np.asarray(coeffs, float)
    direction = np.asarray(direction, float)
    return np.asarray(coeff_derivs, float) + np.einsum("...i,...j,ijk->...k", direction, coeffs, table.gamma)


def connection_diagnostics(table: ConnectionTable, L: float, brackets: BracketTable | None = None) -> dict:
    """Metric-compatibility defect and torsion of a numeric table."""
    if brackets is None:
        brackets = bracket_table(table.space, BracketSource.COORDINATE_DERIVED)
    g = metric_diag(L)
    gam = np.asarray(table.gamma, float)
    # <nabla_k Xi, Xj> + <Xi, nabla_k Xj> for all (k, i, j)
    lowered = gam * g[None, None, :]
    defect = lowered + np.transpose(lowered, (0, 2, 1))
    torsion = gam - np.transpose(gam, (1, 0, 2)) - brackets.c
    return {"metric_defect": float(np.max(np.abs(defect))), "torsion": torsion}


def riemann_tensor(gamma: np.ndarray, brackets: np.ndarray) -> np.ndarray:
    """Curvature ``R(Xi, Xj) Xk`` of a constant connection table.

    ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``.
    Works for float or sympy object arrays.

    Returns:
        Array ``R[i, j, k, :]`` of frame coefficients.
    """
    symbolic = gamma.dtype == object
    R = np.empty((3, 3, 3, 3), dtype=object if symbolic else float)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                vec = []
                for n in range(3):
                    acc = 0
                    for m in range(3):
                        acc += gamma[j, k, m] * gamma[i, m, n] - gamma[i, k, m] * gamma[j, m, n]
                        acc -= brackets[i, j, m] * gamma[m, k, n]
                    vec.append(sp.simplify(acc) if symbolic else acc)
                R[i, j, k] = vec
    return R


@lru_cache(maxsize=None)
def symbolic_riemann(space: ModelSpaceId, dist: DistributionKind) -> np.ndarray:
    space = ModelSpaceId.parse(space)
    table = symbolic_connection(space, DistributionKind.parse(dist))
    return riemann_tensor(table.gamma, bracket_table(space).exact)


# ---------------------------------------------------------------------------
# Printed reference tables. Keys are one-based (i, j): vector for nabla_{Xi}Xj
# or (i, j, k): vector for R(Xi, Xj)Xk. Missing entries are zero.

def _printed_connection(space: ModelSpaceId, dist: DistributionKind) -> dict:
    a, L = PARAM, LSYM
    h = sp.Rational(1, 2)
    if space is ModelSpaceId.AFFINE and dist is DistributionKind.H1:
        return {
            (1, 2): (0, 0, (1 - a) * h),
            (1, 3): (0, -(1 - a) * L * h, 0),
            (2, 1): (0, 0, -(1 - a) * h),
            (2, 3): ((1 - a) * L * h, 0, 0),
            (3, 1): (0, -L * h, -(1 - a)),
            (3, 2): (L * h, 0, 0),
            (3, 3): ((1 - a) * L, 0, 0),
        }
    if space is ModelSpaceId.AFFINE:
        return {
            (1, 2): (0, 0, h),
            (1, 3): (0, -L * h, 0),
            (2, 1): (0, 0, -(1 - a) * h),
            (2, 3): ((1 - a) * L * h, 0, 0),
            (3, 1): (0, -(1 - a) * L * h, -(1 - a)),
            (3, 2): ((1 - a) * L * h, 0, 0),
            (3, 3): ((1 - a) * L, 0, 0),
        }
    if dist is DistributionKind.H1:
        return {
            (1, 2): (0, 0, (1 - a) * (L - 1) / (2 * L)),
            (1, 3): (0, -(1 - L) * (1 - a) * h, 0),
            (2, 1): (0, 0, (1 - a) * (-L - 1) / (2 * L)),
            (2, 3): ((1 - a) * (L + 1) * h, 0, 0),
            (3, 1): (0, -(L + 1) * h, 0),
            (3, 2): ((L + 1) * h, 0, 0),
        }
    return {
        (1, 2): (0, 0, (L - 1) / (2 * L)),
        (1, 3): (0, (1 - L) * h, 0),
        (2, 1): (0, 0, -(-L - 1) * (1 - a) / (2 * L)),
        (2, 3): ((1 - a) * (L + 1) * h, 0, 0),
        (3, 1): (0, -(-1 - L) * (1 - a) * h, 0),
        (3, 2): ((1 - a) * (L + 1) * h, 0, 0),
    }


def _printed_curvature(space: ModelSpaceId, dist: DistributionKind) -> dict:
    a, L = PARAM, LSYM
    q = sp.Rational(1, 4)
    if space is ModelSpaceId.AFFINE and dist is DistributionKind.H1:
        return {
            (1, 2, 1): (0, (1 - a) ** 2 * L * q + L / 2, 1 - a),
            (1, 2, 2): (-((1 - a) * L * q + L / 2), 0, 0),
            (1, 2, 3): (-(1 - a) * L, 0, 0),
            (1, 3, 1): (0, L / 2 * ((1 - a) ** 2 + 1), (1 - a) * (4 - L) * q),
            (1, 3, 2): (-((1 - a) ** 2 + 1) / 2 * L, 0, 0),
            (1, 3, 3): ((1 - a) * (L**2 - 4 * L) * q, 0, 0),
            (2, 3, 2): (0, 0, -(1 - a) * L * q),
            (2, 3, 3): (0, (1 - a) * L**2 * q, 0),
        }
    if space is ModelSpaceId.AFFINE:
        return {
            (1, 2, 1): (0, 3 * (1 - a) * L * q, 1 - a),
            (1, 2, 2): (-3 * (1 - a) * L * q, 0, 0),
            (1, 2, 3): (-(1 - a) * L, 0, 0),
            (1, 3, 1): (0, (1 - a) * L, (1 - a) * (4 - L) * q),
            (1, 3, 2): (-(1 - a) * L, 0, 0),
            (1, 3, 3): ((1 - a) * (L**2 - 4 * L) * q, 0, 0),
            (2, 3, 2): (0, 0, -(1 - a) ** 2 * L * q),
            (2, 3, 3): (0, (1 - a) ** 2 * L**2 * q, 0),
        }
    if dist is DistributionKind.H1:
        return {
            (1, 2, 1): (0, -(1 - L**2) * (1 - a) ** 2 / (4 * L) + (1 + L) / 2, 0),
            (1, 2, 2): ((1 - L**2) * (1 - a) ** 2 / (4 * L) - (1 + L) / 2, 0, 0),
            (1, 3, 1): (0, 0, (-(L**2) + 2 * L + 3) * (1 - a) / (4 * L)),
            (1, 3, 3): ((1 - a) * (L**2 - L - 2) / 2, 0, 0),
            (2, 3, 2): (0, 0, (1 - a) * (L**2 + 2 * L + 1) / (4 * L)),
            (2, 3, 3): (0, (1 - a) * (L**2 + 2 * L + 1) * q, 0),
        }
    return {
        (1, 2, 1): (0, (2 * L**2 + L - 1) * (1 - a) / (2 * L), 0),
        (1, 2, 2): (-L * (L + 1) * (1 - a) / 2, 0, 0),
        (1, 3, 1): (0, 0, (-(L**2) + 2 * L + 3) * (1 - a) / (4 * L)),
        (1, 3, 3): ((1 - a) * (L**2 - 2 * L - 3) * q, 0, 0),
        (2, 3, 2): (0, 0, (1 - a) ** 2 * (L**2 + 2 * L + 1) / (4 * L)),
        (2, 3, 3): (0, (1 - a) ** 2 * (L**2 + 2 * L + 1) * q, 0),
    }


def paper_table(space, dist, param=PARAM, L=LSYM) -> ConnectionTable:
    """Reference connection table exactly as printed.

    With the default symbolic arguments the table is a sympy object array;
    pass numbers to get a float table.
    """
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    gamma = np.empty((3, 3, 3), dtype=object)
    gamma[...] = sp.Integer(0)
    for (i, j), vec in _printed_connection(space, dist).items():
        for k in range(3):
            gamma[i - 1, j - 1, k] = sp.sympify(vec[k])
    table = ConnectionTable(space, gamma, "printed", L=LSYM, dist=dist, param=PARAM)
    if isinstance(param, sp.Basic) and isinstance(L, sp.Basic):
        return table
    return table.numeric(param=float(param), L=float(L))


def paper_curvature_table(space, dist) -> np.ndarray:
    """Printed curvature entries ``R(Xi,Xj)Xk`` (i < j), antisymmetrically completed."""
    space = ModelSpaceId.parse(space)
    dist = DistributionKind.parse(dist)
    R = np.empty((3, 3, 3, 3), dtype=object)
    R[...] = sp.Integer(0)
    for (i, j, k), vec in _printed_curvature(space, dist).items():
        for n in range(3):
            R[i - 1, j - 1, k - 1, n] = sp.sympify(vec[n])
            R[j - 1, i - 1, k - 1, n] = -sp.sympify(vec[n])
    return R


def compare_tables(constructed: np.ndarray, reference: np.ndarray, label: str = "entry") -> list[dict]:
    """Exact (symbolic) comparison; one record per differing vector entry.

    Both inputs are object arrays whose last axis holds frame coefficients.
    Returns records with one-based index tuples and string forms of both
    expressions plus their difference.
    """
    out = []
    for idx in np.ndindex(*constructed.shape[:-1]):
        diff = [sp.simplify(sp.sympify(constructed[idx + (n,)]) - sp.sympify(reference[idx + (n,)])) for n in range(3)]
        if any(d != 0 for d in diff):
            out.append(
                {
                    label: tuple(int(v) + 1 for v in idx),
                    "constructed": [str(sp.factor(constructed[idx + (n,)])) for n in range(3)],
                    "printed": [str(sp.factor(reference[idx + (n,)])) for n in range(3)],
                    "difference": [str(sp.factor(d)) for d in diff],
                }
            )
    return out
