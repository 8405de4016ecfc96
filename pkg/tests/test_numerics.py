import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solitoncs.errors import BoundaryTruncationWarning, ConfigurationError, GridMismatchError
from solitoncs.numerics import (
    ComplexPlaneQuadrature,
    Grid1D,
    MomentumNodes,
    SampledState,
    deriv_array,
    deriv_x,
    fornberg_weights,
    fourier_coefficients,
    inner_product,
    integrate,
    simpson_weights,
    time_derivative,
)


def test_grid_endpoints_and_spacing():
    g = Grid1D(-20, 20, 2001)
    assert g.x[0] == -20 and g.x[-1] == 20
    assert g.spacing == pytest.approx(0.02)
    assert g.x[1000] == 0.0


@pytest.mark.parametrize("args", [(1, -1, 100), (0, 1, 4), (0, 0, 100), (0, np.inf, 100)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ConfigurationError):
        Grid1D(*args)


def test_grid_error_mentions_reversed_bounds():
    with pytest.raises(ConfigurationError, match="reversed"):
        Grid1D(3, -3, 50)


@pytest.mark.parametrize("n", [17, 18, 101, 102])
def test_simpson_integrates_cubics_exactly(n):
    x = np.linspace(0, 2, n)
    w = simpson_weights(n, x[1] - x[0])
    assert w @ (x**3 - x + 1) == pytest.approx(4 - 2 + 2, abs=1e-13)


def test_gaussian_integral(grid):
    assert integrate(np.exp(-grid.x**2), grid).real == pytest.approx(math.sqrt(math.pi), abs=1e-14)


def test_fornberg_central_first_derivative():
    w = fornberg_weights([-1, 0, 1], 1)
    np.testing.assert_allclose(w, [-0.5, 0, 0.5], atol=1e-15)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_interior_stencil_is_eighth_order(order):
    errors = []
    for n in (31, 61):
        x = np.linspace(-3, 3, n)
        exact = [np.cos(x), -np.sin(x), -np.cos(x)][order - 1]
        errors.append(np.abs(deriv_array(np.sin(x), x[1] - x[0], order) - exact)[10:-10].max())
    assert math.log2(errors[0] / errors[1]) > 7.5


@pytest.mark.parametrize("order", [1, 2, 3])
def test_boundary_windows_converge(order):
    errors = []
    for n in (31, 61):
        x = np.linspace(-3, 3, n)
        exact = [np.cos(x), -np.sin(x), -np.cos(x)][order - 1]
        errors.append(np.abs(deriv_array(np.sin(x), x[1] - x[0], order) - exact).max())
    assert errors[1] < errors[0] / 50


def test_derivative_order_rejected():
    with pytest.raises(ValueError):
        deriv_array(np.zeros(40), 0.1, 4)


def test_states_on_different_grids_do_not_mix(grid):
    f = SampledState(grid, 0.0, np.ones(grid.n_points))
    g = SampledState(Grid1D(-10, 10, 2001), 0.0, np.ones(2001))
    with pytest.raises(GridMismatchError):
        inner_product(f, g)
    with pytest.raises(GridMismatchError):
        f + SampledState(grid, 0.5, np.ones(grid.n_points))


def test_time_derivative_of_phase(grid):
    d = time_derivative(lambda t: SampledState(grid, t, np.exp(-1j * 2.0 * t) * np.ones(grid.n_points)), 0.3)
    np.testing.assert_allclose(d.values, -2j * np.exp(-0.6j), atol=1e-10)


def test_parseval_for_gaussian(grid, nodes):
    f = SampledState(grid, 0.0, np.pi**-0.25 * np.exp(-0.5 * grid.x**2))
    c = fourier_coefficients(f, nodes.p)
    assert nodes.weights @ np.abs(c) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_fourier_warns_at_boundary(grid):
    f = SampledState(grid, 0.0, np.exp(-0.1 * np.abs(grid.x)))
    with pytest.warns(BoundaryTruncationWarning):
        fourier_coefficients(f, [0.0])


def test_momentum_nodes_validate():
    with pytest.raises(ConfigurationError):
        MomentumNodes(-1.0, 10)


@pytest.mark.parametrize("scheme", ["polar", "hermite"])
def test_plane_quadrature_gaussian_area(scheme):
    q = ComplexPlaneQuadrature(9.0, 60, 48, scheme)
    assert q.integrate(lambda z: np.exp(-np.abs(z) ** 2)).real == pytest.approx(math.pi, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_derivative_of_shifted_gaussian(width, shift):
    g = Grid1D(-12, 12, 1201)
    f = SampledState(g, 0.0, np.exp(-width * (g.x - shift) ** 2))
    exact = -2 * width * (g.x - shift) * f.values
    assert np.abs(deriv_x(f).values - exact).max() < 1e-6 * max(1.0, width**1.5) * 10


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3))
def test_inner_product_is_sesquilinear(coeffs):
    g = Grid1D(-5, 5, 101)
    a, b, c = coeffs
    f = SampledState(g, 0.0, np.exp(-g.x**2) * (1 + 1j * g.x))
    h = SampledState(g, 0.0, np.exp(-g.x**2 / 2))
    lhs = inner_product(a * f, b * h + c * f)
    rhs = np.conj(a) * (b * inner_product(f, h) + c * inner_product(f, f))
    assert abs(lhs - rhs) < 1e-10 * (1 + abs(rhs))
