import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srgb.errors import DomainError, ParameterError
from srgb.model_spaces import (
    BracketSource,
    ModelSpaceId,
    bracket_table,
    coframe_eval,
    coordinate_to_frame,
    diff_bracket_tables,
    frame_at,
    frame_to_coordinate,
    metric_inner,
)

AFFINE, E11 = ModelSpaceId.AFFINE, ModelSpaceId.E11
R2 = math.sqrt(2) / 2


def test_parse_aliases():
    assert ModelSpaceId.parse("affine") is AFFINE
    assert ModelSpaceId.parse(E11) is E11
    with pytest.raises(ParameterError):
        ModelSpaceId.parse("heisenberg")


@pytest.mark.parametrize(
    "space, p, cols",
    [
        (AFFINE, (2, 5, 1), [(2, 0, 0), (0, 2, 1), (0, 2, 0)]),
        (E11, (0, 0, 0), [(0, 0, 1), (-R2, R2, 0), (-R2, -R2, 0)]),
        (AFFINE, (1, 0, 0), [(1, 0, 0), (0, 1, 1), (0, 1, 0)]),
    ],
)
def test_frame_columns(space, p, cols):
    np.testing.assert_allclose(frame_at(space, p), np.array(cols).T, atol=1e-15)


def test_affine_domain_error():
    with pytest.raises(DomainError):
        frame_at(AFFINE, (0.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        coordinate_to_frame(AFFINE, (-1.0, 0, 0), (1, 0, 0))


@pytest.mark.parametrize(
    "v, expected",
    [((1, 0, 0), (0.5, 0, 0)), ((0, 0, 1), (0, 1, -1))],
)
def test_coordinate_to_frame_affine(v, expected):
    np.testing.assert_allclose(coordinate_to_frame(AFFINE, (2, 0.3, -1), v), expected, atol=1e-15)


def test_coframe_examples():
    w1, w2, w = coframe_eval(AFFINE, (2, 0, 0), (0, 1, 0))
    assert w == pytest.approx(0.5)
    w1, w2, w = coframe_eval(E11, (0, 0, 0), (1, 0, 0))
    assert (w1, w2, w) == pytest.approx((0.0, -R2, -R2), abs=1e-15)


@pytest.mark.parametrize("space", [AFFINE, E11])
def test_coframe_duality(space):
    p = (1.7, -0.4, 0.9)
    F = frame_at(space, p)
    dual = np.array([coframe_eval(space, p, F[:, j]) for j in range(3)]).T
    np.testing.assert_allclose(dual, np.eye(3), atol=1e-12)


def test_metric_inner():
    assert metric_inner(4, (1, 2, 3), (1, 2, 3)) == pytest.approx(41)
    assert metric_inner(7.5, (0, 0, 1), (0, 0, 1)) == pytest.approx(7.5)
    assert metric_inner(7.5, (1, 0, 0), (0, 0, 1)) == 0
    with pytest.raises(ParameterError):
        metric_inner(0.0, (1, 0, 0), (1, 0, 0))


def test_brackets():
    e11 = bracket_table(E11, BracketSource.COORDINATE_DERIVED)
    np.testing.assert_allclose(e11.c[0, 2], (0, 1, 0))
    assert diff_bracket_tables(e11, bracket_table(E11, BracketSource.PAPER_TABLE)) == []
    aff = bracket_table(AFFINE, BracketSource.COORDINATE_DERIVED)
    np.testing.assert_allclose(aff.c[0, 2], (0, 0, 1))
    diff = diff_bracket_tables(aff, bracket_table(AFFINE, BracketSource.PAPER_TABLE))
    assert [d["entry"] for d in diff] == ["[X1,X3]"]
    np.testing.assert_allclose(bracket_table(AFFINE, BracketSource.PAPER_TABLE).c[1, 2], 0)
    for table in (aff, e11):
        np.testing.assert_allclose(table.c, -np.transpose(table.c, (1, 0, 2)))


coords = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(x1=st.floats(0.05, 5), x2=coords, x3=coords, v=st.tuples(coords, coords, coords))
def test_round_trip(x1, x2, x3, v):
    for space in (AFFINE, E11):
        p = (x1, x2, x3)
        back = frame_to_coordinate(space, p, coordinate_to_frame(space, p, v))
        np.testing.assert_allclose(back, v, atol=1e-12 * max(1.0, np.max(np.abs(v)) / x1))
