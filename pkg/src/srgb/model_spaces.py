"""Model Lie groups, their left-invariant frames, coframes and brackets.

Two three-dimensional groups are supported, both in global coordinates
``(x1, x2, x3)``:

* the affine group, on the half space ``x1 > 0`` with identity ``(1, 0, 0)``;
* ``E(1,1)``, the rigid motions of the Minkowski plane, on all of R^3.

Tangent vectors are handled as arrays of frame coefficients
``(a1, a2, a3)`` against ``X1, X2, X3``. The metric ``g_L`` makes
``X1, X2, L^{-1/2} X3`` orthonormal, so ``|v|_L^2 = a1^2 + a2^2 + L a3^2``.

Every function accepts stacked inputs of shape ``(..., 3)`` and returns
arrays with matching leading dimensions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import DomainError, ParameterError

__all__ = [
    "ModelSpaceId",
    "BracketSource",
    "BracketTable",
    "frame_at",
    "frame_jacobian",
    "coframe_matrix",
    "coframe_jacobian",
    "coordinate_to_frame",
    "frame_to_coordinate",
    "coframe_eval",
    "bracket_table",
    "diff_bracket_tables",
    "metric_inner",
    "metric_norm",
    "metric_diag",
    "check_points",
    "symbolic_frame",
    "COORDS",
]

_R2 = np.sqrt(2.0)
COORDS = sp.symbols("x1 x2 x3", real=True)


class ModelSpaceId(str, enum.Enum):
    """Identifier of a model group."""

    AFFINE = "affine"
    E11 = "e11"

    @classmethod
    def parse(cls, value: "str | ModelSpaceId") -> "ModelSpaceId":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("(", "").replace(")", "").replace(",", "")
        aliases = {"affine": cls.AFFINE, "m": cls.AFFINE, "e11": cls.E11}
        if key not in aliases:
            raise ParameterError(f"unknown model space {value!r}")
        return aliases[key]


class BracketSource(str, enum.Enum):
    COORDINATE_DERIVED = "coordinate"
    PAPER_TABLE = "printed"


def check_points(space: ModelSpaceId, p) -> np.ndarray:
    """Return ``p`` as a float array of shape ``(..., 3)`` after domain checks."""
    pts = np.asarray(p, dtype=float)
    if pts.shape[-1:] != (3,):
        raise DomainError(f"points must have trailing dimension 3, got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("non-finite coordinates")
    if space is ModelSpaceId.AFFINE and np.any(pts[..., 0] <= 0.0):
        raise DomainError("affine group chart requires x1 > 0")
    return pts


def frame_at(space: ModelSpaceId, p) -> np.ndarray:
    """Frame matrix whose columns are ``X1, X2, X3`` in the coordinate basis.

    Args:
        space: Model group.
        p: Point(s), shape ``(..., 3)``.

    Returns:
        Array of shape ``(..., 3, 3)``; entry ``[a, j]`` is the ``d/dx_a``
        component of ``X_j``.
    """
    space = ModelSpaceId.parse(space)
    pts = check_points(space, p)
    out = np.zeros(pts.shape[:-1] + (3, 3))
    if space is ModelSpaceId.AFFINE:
        x1 = pts[..., 0]
        out[..., 0, 0] = x1
        out[..., 1, 1] = x1
        out[..., 2, 1] = 1.0
        out[..., 1, 2] = x1
    else:
        ep = np.exp(pts[..., 2]) / _R2
        em = np.exp(-pts[..., 2]) / _R2
        out[..., 2, 0] = 1.0
        out[..., 0, 1] = -ep
        out[..., 1, 1] = em
        out[..., 0, 2] = -ep
        out[..., 1, 2] = -em
    return out


def frame_jacobian(space: ModelSpaceId, p) -> np.ndarray:
    """Coordinate derivatives of the frame matrix.

    Returns:
        Array of shape ``(..., 3, 3, 3)`` with entry ``[b, a, j]`` equal to
        ``d/dx_b`` of ``frame_at(p)[a, j]``.
    """
    space = ModelSpaceId.parse(space)
    pts = check_points(space, p)
    out = np.zeros(pts.shape[:-1] + (3, 3, 3))
    if space is ModelSpaceId.AFFINE:
        out[..., 0, 0, 0] = 1.0
        out[..., 0, 1, 1] = 1.0
        out[..., 0, 1, 2] = 1.0
    else:
        ep = np.exp(pts[..., 2]) / _R2
        em = np.exp(-pts[..., 2]) / _R2
        out[..., 2, 0, 1] = -ep
        out[..., 2, 1, 1] = -em
        out[..., 2, 0, 2] = -ep
        out[..., 2, 1, 2] = em
    return out


def coframe_matrix(space: ModelSpaceId, p) -> np.ndarray:
    """Rows are the dual 1-forms ``omega1, omega2, omega`` in coordinates.

    This is the inverse of :func:`frame_at`, written out in closed form.
    """
    space = ModelSpaceId.parse(space)
    pts = check_points(space, p)
    out = np.zeros(pts.shape[:-1] + (3, 3))
    if space is ModelSpaceId.AFFINE:
        inv = 1.0 / pts[..., 0]
        out[..., 0, 0] = inv
        out[..., 1, 2] = 1.0
        out[..., 2, 1] = inv
        out[..., 2, 2] = -1.0
    else:
        ep = np.exp(pts[..., 2]) / _R2
        em = np.exp(-pts[..., 2]) / _R2
        out[..., 0, 2] = 1.0
        out[..., 1, 0] = -em
        out[..., 1, 1] = ep
        out[..., 2, 0] = -em
        out[..., 2, 1] = -ep
    return out


def coframe_jacobian(space: ModelSpaceId, p) -> np.ndarray:
    """Entry ``[b, i, a]`` is ``d/dx_b`` of ``coframe_matrix(p)[i, a]``."""
    space = ModelSpaceId.parse(space)
    pts = check_points(space, p)
    out = np.zeros(pts.shape[:-1] + (3, 3, 3))
    if space is ModelSpaceId.AFFINE:
        inv2 = 1.0 / pts[..., 0] ** 2
        out[..., 0, 0, 0] = -inv2
        out[..., 0, 2, 1] = -inv2
    else:
        ep = np.exp(pts[..., 2]) / _R2
        em = np.exp(-pts[..., 2]) / _R2
        out[..., 2, 1, 0] = em
        out[..., 2, 1, 1] = ep
        out[..., 2, 2, 0] = em
        out[..., 2, 2, 1] = -ep
    return out


def coordinate_to_frame(space: ModelSpaceId, p, v_coord) -> np.ndarray:
    """Frame coefficients of a coordinate vector ``v_coord`` at ``p``."""
    w = coframe_matrix(space, p)
    return np.einsum("...ia,...a->...i", w, np.asarray(v_coord, dtype=float))


def frame_to_coordinate(space: ModelSpaceId, p, coeffs) -> np.ndarray:
    """Inverse of :func:`coordinate_to_frame`."""
    f = frame_at(space, p)
    return np.einsum("...aj,...j->...a", f, np.asarray(coeffs, dtype=float))


def coframe_eval(space: ModelSpaceId, p, v_coord) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate ``(omega1, omega2, omega)`` on a coordinate vector."""
    c = coordinate_to_frame(space, p, v_coord)
    return c[..., 0], c[..., 1], c[..., 2]


def metric_diag(L: float) -> np.ndarray:
    """Diagonal of ``g_L`` in the frame basis."""
    if not np.isfinite(L) or L <= 0:
        raise ParameterError(f"L must be positive, got {L!r}")
    return np.array([1.0, 1.0, float(L)])


def metric_inner(L: float, v, w) -> np.ndarray:
    """``g_L(v, w)`` for frame coefficient arrays ``v`` and ``w``.

    >>> float(metric_inner(4.0, [1, 2, 3], [1, 2, 3]))
    41.0
    """
    g = metric_diag(L)
    return np.einsum("...i,i,...i->...", np.asarray(v, float), g, np.asarray(w, float))


def metric_norm(L: float, v) -> np.ndarray:
    return np.sqrt(metric_inner(L, v, v))


def symbolic_frame(space: ModelSpaceId) -> sp.Matrix:
    """Frame matrix as a sympy matrix in the coordinate symbols."""
    x1, x2, x3 = COORDS
    if ModelSpaceId.parse(space) is ModelSpaceId.AFFINE:
        return sp.Matrix([[x1, 0, 0], [0, x1, x1], [0, 1, 0]])
    r = 1 / sp.sqrt(2)
    return sp.Matrix(
        [
            [0, -r * sp.exp(x3), -r * sp.exp(x3)],
            [0, r * sp.exp(-x3), -r * sp.exp(-x3)],
            [1, 0, 0],
        ]
    )


@dataclass(frozen=True)
class BracketTable:
    """Structure constants: ``c[i, j]`` holds the frame coefficients of ``[Xi, Xj]``.

    Indices are zero based in code, so ``c[0, 2]`` is ``[X1, X3]``.
    """

    space: ModelSpaceId
    source: BracketSource
    c: np.ndarray
    exact: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.c.setflags(write=False)

    def bracket(self, v, w) -> np.ndarray:
        """Bracket of two left-invariant fields given by constant coefficients."""
        return np.einsum("i,j,ijk->k", np.asarray(v, float), np.asarray(w, float), self.c)


_PRINTED_BRACKETS = {
    # (i, j) -> coefficients of [Xi, Xj], zero-based indices, i < j.
    ModelSpaceId.AFFINE: {(0, 1): (0, 0, 1), (0, 2): (0, 1, 0), (1, 2): (0, 0, 0)},
    ModelSpaceId.E11: {(0, 1): (0, 0, 1), (0, 2): (0, 1, 0), (1, 2): (0, 0, 0)},
}


def _table_from_pairs(pairs: dict) -> np.ndarray:
    out = np.empty((3, 3, 3), dtype=object)
    out[...] = sp.Integer(0)
    for (i, j), vec in pairs.items():
        for k in range(3):
            out[i, j, k] = sp.nsimplify(vec[k])
            out[j, i, k] = -sp.nsimplify(vec[k])
    return out


def _derived_brackets(space: ModelSpaceId) -> np.ndarray:
    frame = symbolic_frame(space)
    coframe = sp.simplify(frame.inv())
    cols = [frame[:, j] for j in range(3)]

    def apply(vec: sp.Matrix, fld: sp.Matrix) -> sp.Matrix:
        return sp.Matrix([sum(vec[b] * sp.diff(fld[a], COORDS[b]) for b in range(3)) for a in range(3)])

    pairs = {}
    for i in range(3):
        for j in range(i + 1, 3):
            comm = apply(cols[i], cols[j]) - apply(cols[j], cols[i])
            coeffs = sp.simplify(coframe * comm)
            pairs[(i, j)] = tuple(coeffs)
    # The coefficients must be constant: probe numerically at distinct points.
    probes = [(1.0, 0.0, 0.0), (2.5, -1.0, 0.7), (0.3, 4.0, -1.3)]
    for vec in pairs.values():
        for expr in vec:
            vals = [float(sp.sympify(expr).subs(dict(zip(COORDS, pt)))) for pt in probes]
            if max(vals) - min(vals) > 1e-9:
                raise AssertionError(f"bracket coefficient {expr} is not constant")
    return _table_from_pairs({k: tuple(sp.nsimplify(e) for e in v) for k, v in pairs.items()})


@lru_cache(maxsize=None)
def bracket_table(space: ModelSpaceId, source: BracketSource = BracketSource.COORDINATE_DERIVED) -> BracketTable:
    """Structure constants of the frame.

    ``COORDINATE_DERIVED`` computes commutators of the coordinate frame
    symbolically and confirms they are constant; ``PAPER_TABLE`` returns the
    printed reference values.
    """
    space = ModelSpaceId.parse(space)
    source = BracketSource(source)
    if source is BracketSource.COORDINATE_DERIVED:
        exact = _derived_brackets(space)
    else:
        exact = _table_from_pairs(_PRINTED_BRACKETS[space])
    c = np.array(exact.tolist(), dtype=float)
    return BracketTable(space=space, source=source, c=c, exact=exact)


def diff_bracket_tables(a: BracketTable, b: BracketTable, tol: float = 1e-9) -> list[dict]:
    """Entries ``[Xi, Xj]`` (i < j, one-based in the output) where tables differ."""
    out = []
    for i in range(3):
        for j in range(i + 1, 3):
            if np.max(np.abs(a.c[i, j] - b.c[i, j])) > tol:
                out.append(
                    {
                        "entry": f"[X{i + 1},X{j + 1}]",
                        a.source.value: a.c[i, j].tolist(),
                        b.source.value: b.c[i, j].tolist(),
                    }
                )
    return out
