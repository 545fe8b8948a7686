"""Quadrature rules, the orthonormal Legendre basis, grids, and local projection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymra import DyadicCube, grid_for, local_project, lp_norm
from polymra.grid import Grid
from polymra.quadrature import (
    gauss_rule,
    interval_basis_table,
    legendre_eval,
    legendre_table,
)


def test_gauss_midpoint():
    x, w = gauss_rule(1)
    np.testing.assert_allclose(x, [0.5], atol=1e-15)
    np.testing.assert_allclose(w, [1.0], atol=1e-15)


def test_gauss_two_point():
    x, w = gauss_rule(2)
    half = 1.0 / (2.0 * np.sqrt(3.0))
    np.testing.assert_allclose(x, [0.5 - half, 0.5 + half], atol=1e-15)
    np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-15)


def test_gauss_invalid():
    with pytest.raises(ValueError):
        gauss_rule(0)


@settings(deadline=None)
@given(st.integers(min_value=1, max_value=12))
def test_gauss_exactness(n):
    # n points integrate monomials up to degree 2n-1 exactly
    x, w = gauss_rule(n)
    assert abs(np.sum(w) - 1.0) < 1e-14
    assert np.all(x > 0) and np.all(x < 1)
    for k in range(2 * n):
        assert abs(np.dot(w, x ** k) - 1.0 / (k + 1)) < 1e-13


def test_legendre_values():
    assert legendre_eval(0, 0.37) == pytest.approx(1.0, abs=1e-15)
    assert legendre_eval(1, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert legendre_eval(1, 1.0) == pytest.approx(np.sqrt(3.0), abs=1e-14)
    with pytest.raises(ValueError):
        legendre_eval(-1, 0.5)


def test_legendre_orthonormal():
    x, w = gauss_rule(8)
    table = legendre_table(6, x)
    gram = (table * w) @ table.T
    np.testing.assert_allclose(gram, np.eye(7), atol=1e-12)


def test_legendre_table_matches_eval():
    x = np.linspace(0.05, 0.95, 7)
    table = legendre_table(4, x)
    for k in range(5):
        np.testing.assert_allclose(table[k], legendre_eval(k, x), atol=1e-13)


def test_interval_basis_orthonormal():
    lo, width = 0.25, 0.5
    g, w = gauss_rule(6)
    xs, ws = lo + width * g, width * w
    table = interval_basis_table(4, xs, lo, width)
    np.testing.assert_allclose((table * ws) @ table.T, np.eye(5), atol=1e-12)


def test_interval_basis_bad_width():
    with pytest.raises(ValueError):
        interval_basis_table(2, [0.5], 0.0, 0.0)


# -- grids ------------------------------------------------------------------


def test_grid_defaults():
    g = grid_for(1, degree=0)
    assert g.level == 6
    assert g.shape == (2 ** 6 * 2,)
    assert grid_for(3, degree=0).level == 4
    assert abs(np.sum(g.axis_weights[0]) - 1.0) < 1e-14


def test_grid_invalid():
    with pytest.raises(ValueError):
        Grid(0, 3, (2,))
    with pytest.raises(ValueError):
        Grid(1, -1, (2,))
    with pytest.raises(ValueError):
        grid_for(2, degree=(1,))


def test_integrate_polynomial():
    g = grid_for(1, degree=0, level=3)
    f = g.sample(lambda x: x ** 2)
    assert abs(f.integral() - 1.0 / 3.0) < 1e-14


def test_integrate_d2():
    g = grid_for(2, degree=(1, 0), level=2)
    f = g.sample(lambda x, y: x * y)
    assert abs(f.integral() - 0.25) < 1e-14


def test_lp_norm_values():
    g = grid_for(1, degree=1, level=4)
    f = g.sample(lambda x: x)
    assert lp_norm(f, 2) == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-14)
    c = g.sample(lambda x: 0.0 * x - 2.5)
    for p in (1, 1.5, 2, 4):
        assert lp_norm(c, p) == pytest.approx(2.5, abs=1e-13)
    sign = g.sample(lambda x: np.where(x < 0.5, -1.0, 1.0))
    for p in (1, 2, 3):
        assert lp_norm(sign, p) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


# -- local projection -------------------------------------------------------


def test_local_project_constant():
    g = grid_for(2, degree=1, level=2)
    f = g.sample(lambda x, y: np.ones_like(x * y))
    cube = DyadicCube(level=(0, 0), pos=(0, 0))
    poly = local_project(f, cube, (1, 1))
    expected = np.zeros((2, 2))
    expected[0, 0] = 1.0
    np.testing.assert_allclose(poly.coeffs, expected, atol=1e-13)


def test_local_project_linear():
    # projection of x onto {1, sqrt(3)(2x-1)} has coefficients (1/2, 1/(2 sqrt 3))
    g = grid_for(1, degree=1, level=2)
    f = g.sample(lambda x: x)
    poly = local_project(f, DyadicCube(level=(0,), pos=(0,)), (1,))
    np.testing.assert_allclose(
        poly.coeffs, [0.5, 1.0 / (2.0 * np.sqrt(3.0))], atol=1e-14
    )


def test_local_project_reproduces_polynomials(rng):
    g = grid_for(2, degree=(2, 1), level=2)
    cube = DyadicCube(level=(1, 2), pos=(1, 3))
    for _ in range(5):
        coeffs = rng.standard_normal((3, 2))
        from polymra import LocalPoly

        poly = LocalPoly(cube=cube, degrees=(2, 1), coeffs=coeffs)
        f = g.function(poly.values_on(g))
        back = local_project(f, cube, (2, 1))
        np.testing.assert_allclose(back.coeffs, coeffs, atol=1e-12 * np.abs(coeffs).max())


def test_local_project_residual_orthogonal():
    g = grid_for(1, degree=2, level=1)
    f = g.sample(lambda x: np.sin(3.0 * x))
    cube = DyadicCube(level=(1,), pos=(0,))
    poly = local_project(f, cube, (2,))
    residual = f.values - poly.values_on(g)
    sl = g.cube_slices(cube)[0]
    xs, ws = g.axis_nodes[0][sl], g.axis_weights[0][sl]
    table = interval_basis_table(2, xs, 0.0, 0.5)
    for q in table:
        assert abs(np.dot(ws, residual[sl] * q)) < 1e-12


def test_local_project_stability(rng):
    g = grid_for(1, degree=1, level=3)
    cube = DyadicCube(level=(0,), pos=(0,))
    for _ in range(10):
        f = g.function(rng.standard_normal(g.shape))
        poly = local_project(f, cube, (1,))
        norm_pf = np.sqrt(g.integrate(poly.values_on(g) ** 2))
        assert norm_pf <= lp_norm(f, 2) * (1.0 + 1e-12)


def test_local_project_cube_outside():
    g = grid_for(1, degree=0, level=2)
    f = g.sample(lambda x: x)
    with pytest.raises(ValueError):
        local_project(f, DyadicCube(level=(3,), pos=(0,)), (0,))
    with pytest.raises(ValueError):
        local_project(f, DyadicCube(level=(1,), pos=(2,)), (0,))
