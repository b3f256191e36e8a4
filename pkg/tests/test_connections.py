import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from srgb.connections import (
    LSYM,
    PARAM,
    ConnectionContext,
    DistributionKind,
    build_connection,
    compare_tables,
    connection_diagnostics,
    covariant_derivative,
    deform,
    koszul_levi_civita,
    laurent_split,
    paper_curvature_table,
    paper_table,
    riemann_tensor,
    svk_connection,
    symbolic_connection,
    symbolic_riemann,
)
from srgb.errors import ParameterError
from srgb.model_spaces import ModelSpaceId, bracket_table, metric_diag

AFFINE, E11 = ModelSpaceId.AFFINE, ModelSpaceId.E11
H1, H2 = DistributionKind.H1, DistributionKind.H2
FAMILIES = list(itertools.product([AFFINE, E11], [H1, H2]))


def test_koszul_examples():
    L = 4.0
    aff = koszul_levi_civita(AFFINE, L).gamma
    np.testing.assert_allclose(aff[0, 1], (0, 0, 0.5))
    np.testing.assert_allclose(aff[2, 2], (L, 0, 0))
    e11 = koszul_levi_civita(E11, L).gamma
    np.testing.assert_allclose(e11[0, 1], (0, 0, (L - 1) / (2 * L)))


def test_koszul_torsion_free_and_metric():
    for space in (AFFINE, E11):
        for L in (0.5, 1.0, 4.0, 100.0):
            diag = connection_diagnostics(koszul_levi_civita(space, L), L)
            assert diag["metric_defect"] < 1e-12
            assert np.max(np.abs(diag["torsion"])) < 1e-12


def test_svk_examples():
    L = 3.0
    svk = svk_connection(koszul_levi_civita(AFFINE, L), H1).gamma
    np.testing.assert_allclose(svk[2, 0], (0, -L / 2, 0))
    np.testing.assert_allclose(svk[0, 0], 0)


def test_deform_examples():
    table = build_connection(AFFINE, H1, 0.5, 4.0).gamma
    np.testing.assert_allclose(table[2, 0], (0, -2, -0.5))
    lc = koszul_levi_civita(AFFINE, 4.0)
    svk = svk_connection(lc, H1)
    np.testing.assert_array_equal(deform(lc, svk, 0.0).gamma, lc.gamma)
    np.testing.assert_array_equal(deform(lc, svk, 1.0).gamma, svk.gamma)


def test_torsion_at_param_one():
    table = build_connection(AFFINE, H1, 1.0, 2.0)
    torsion = connection_diagnostics(table, 2.0)["torsion"]
    np.testing.assert_allclose(torsion[0, 1], (0, 0, -1))


@pytest.mark.parametrize("space, dist", FAMILIES)
def test_svk_preserves_splitting(space, dist):
    gamma = svk_connection(koszul_levi_civita(space, 2.5), dist).gamma
    horiz = list(dist.horizontal)
    vert = [k for k in range(3) if k not in horiz]
    for i in range(3):
        for j in horiz:
            np.testing.assert_allclose(gamma[i, j, vert], 0, atol=1e-15)
        for j in vert:
            np.testing.assert_allclose(gamma[i, j, horiz], 0, atol=1e-15)


def test_printed_tables():
    # spot entries taken from the printed reference tables
    a, L = 0.3, 4.0
    aff2 = paper_table(AFFINE, H2).numeric(a, L).gamma
    np.testing.assert_allclose(aff2[2, 1], ((1 - a) * L / 2, 0, 0))
    np.testing.assert_allclose(aff2[0, 1], (0, 0, 0.5))
    e1 = paper_table(E11, H1).numeric(a, L).gamma
    np.testing.assert_allclose(e1[2, 1], ((L + 1) / 2, 0, 0))
    e2 = paper_table(E11, H2).numeric(a, L).gamma
    np.testing.assert_allclose(e2[0, 2], (0, (1 - L) / 2, 0))


@pytest.mark.parametrize("space, dist", FAMILIES)
def test_constructed_matches_printed_outside_logged_entries(space, dist):
    diffs = compare_tables(symbolic_connection(space, dist).gamma, paper_table(space, dist).gamma)
    logged = {d["entry"] for d in diffs}
    expected = {
        (AFFINE, H1): set(),
        (AFFINE, H2): set(),
        (E11, H1): {(1, 3)},
        (E11, H2): {(2, 1), (3, 1)},
    }[(space, dist)]
    assert logged == expected


@pytest.mark.parametrize("space, dist", FAMILIES)
def test_metric_compatibility_grid(space, dist):
    for a, L in itertools.product([0, 0.3, 0.7, 1], [0.5, 1, 4, 100]):
        assert connection_diagnostics(build_connection(space, dist, a, L), L)["metric_defect"] < 1e-12


def test_curvature_spot_value_symbolic():
    R = symbolic_riemann(AFFINE, H1)
    target = [0, (1 - PARAM) * LSYM**2 / 4, 0]
    assert all(sp.simplify(R[1, 2, 2, n] - target[n]) == 0 for n in range(3))
    assert all(sp.simplify(e) == 0 for e in symbolic_riemann(E11, H1)[1, 2, 0])


@pytest.mark.parametrize("space, dist", FAMILIES)
def test_curvature_symmetries(space, dist):
    brk = bracket_table(space).c
    for a, L in itertools.product([0, 0.3, 0.7, 1], [0.5, 4]):
        R = riemann_tensor(build_connection(space, dist, a, L).gamma, brk)
        np.testing.assert_allclose(R, -np.transpose(R, (1, 0, 2, 3)), atol=1e-12)
        lowered = R * metric_diag(L)
        np.testing.assert_allclose(lowered, -np.transpose(lowered, (0, 1, 3, 2)), atol=1e-10)


def test_printed_curvature_logged_entries_affine():
    diffs = compare_tables(symbolic_riemann(AFFINE, H1), paper_curvature_table(AFFINE, H1))
    assert {d["entry"] for d in diffs} == {(1, 2, 2), (2, 1, 2)}
    assert compare_tables(symbolic_riemann(AFFINE, H2), paper_curvature_table(AFFINE, H2)) == []


def test_covariant_derivative_examples():
    table = build_connection(AFFINE, H1, 0.0, 5.0)
    np.testing.assert_allclose(covariant_derivative(table, (0, 0, 1), (0, 0, 1), (0, 0, 0)), (5, 0, 0))
    np.testing.assert_allclose(covariant_derivative(table, (0, 0, 0), (1, 2, 3), (0, 0, 0)), 0)
    np.testing.assert_allclose(covariant_derivative(table, (0.7, 0, 0), (1, 0, 0), (1, 0, 0)), (1, 0, 0))


@pytest.mark.parametrize("space, dist", FAMILIES)
def test_laurent_split_reassembles(space, dist):
    G1, G0, Gm = laurent_split(space, dist, 0.4)
    for L in (0.5, 3.0, 80.0):
        np.testing.assert_allclose(L * G1 + G0 + Gm / L, build_connection(space, dist, 0.4, L).gamma, atol=1e-12)


def test_bad_inputs():
    with pytest.raises(ParameterError):
        build_connection(AFFINE, H1, 0.0, -1.0)
    with pytest.raises(ParameterError):
        DistributionKind.parse("h3")
    ctx = ConnectionContext.build("e11", "h2", 0.2, 3.0)
    assert ctx.space is E11 and ctx.dist is H2


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0, 1), b=st.floats(0, 1), L=st.floats(0.1, 1e3))
def test_deform_is_affine_in_param(a, b, L):
    for space, dist in FAMILIES:
        ga = build_connection(space, dist, a, L).gamma
        gb = build_connection(space, dist, b, L).gamma
        gm = build_connection(space, dist, (a + b) / 2, L).gamma
        np.testing.assert_allclose(gm, (ga + gb) / 2, atol=1e-9 * max(1.0, L))
