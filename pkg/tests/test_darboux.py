import math
import warnings

import numpy as np
import pytest

from solitoncs import darboux as dx
from solitoncs import freeparticle as fp
from solitoncs.errors import (
    BoundaryTruncationWarning,
    ConfigurationError,
    GridMismatchError,
    InvalidTransformationFunction,
)
from solitoncs.numerics import Grid1D, SampledState, inner_product


@pytest.mark.parametrize("a", [0.6, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.0, 1.3])
def test_soliton_potential(grid, a, t):
    v1 = dx.transformed_potential(dx.soliton_seed(a), grid, t)
    assert np.abs(v1 - dx.soliton_potential(a, grid.x)).max() < 1e-8


def test_potential_minimum(grid):
    v1 = dx.transformed_potential(dx.soliton_seed(2.0), grid)
    assert v1.min() == pytest.approx(-8.0, abs=1e-8)


def test_non_positive_a_rejected():
    with pytest.raises(ConfigurationError):
        dx.soliton_seed(0.0)
    with pytest.raises(ConfigurationError):
        dx.soliton_seed(-1.0)


def test_soliton_operator_is_tanh(grid):
    op = dx.soliton_operator(1.0, grid, 1.3)
    assert op.gauge == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(op.log_derivative, -np.tanh(grid.x), atol=1e-9)


def test_zero_rejected_with_location(grid):
    u = dx.TransformationFunction(u=lambda x, t: np.sinh(x - 1.0) + 0j, name="sinh")
    with pytest.raises(InvalidTransformationFunction) as info:
        dx.validate_u(u, grid)
    assert info.value.location == pytest.approx(1.0, abs=grid.spacing)


def test_mixture_fails_validity(grid):
    diag = dx.validate_u(dx.state_seed({0: 1.0, 1: 0.5}), grid)
    assert not diag.valid
    with pytest.raises(InvalidTransformationFunction):
        dx.darboux_from_u(dx.state_seed({0: 1.0, 1: 0.5}), grid, 0.0)


def test_plane_wave_seed_is_valid(grid):
    assert dx.validate_u(dx.plane_wave_seed(2.0), grid, 0.4).valid


def test_gaussian_seed_gauge_and_potential(grid):
    seed = dx.state_seed({0: 1.0})
    t = 1.3
    assert dx.gauge_factor(seed, grid, t) == pytest.approx(math.sqrt(1 + t * t), abs=1e-8)
    v1 = dx.transformed_potential(seed, grid, t)
    inner = slice(100, -100)
    np.testing.assert_allclose(v1[inner], 1 / (1 + t * t), atol=1e-7)


@pytest.mark.parametrize("t", [0.0, 1.3])
def test_intertwining(grid, t):
    for seed in (dx.soliton_seed(1.0), dx.state_seed({0: 1.0})):
        r = dx.intertwining_residual(lambda s: fp.psi_n(3, grid, s), seed, grid, t)
        assert r < 1e-5


def test_factorization(grid):
    a, t = 1.0, 1.3
    op = dx.soliton_operator(a, grid, t)
    for n in range(9):
        psi = fp.psi_n(n, grid, t)
        r = dx.apply_L(dx.apply_L(psi, op), op, "adjoint") - fp.apply_h0(psi) - a * a * psi
        assert r.norm() < 1e-6
        phi = dx.phi_n(n, grid, t, a)
        r = dx.apply_L(dx.apply_L(phi, op, "adjoint"), op) - dx.apply_h1(phi, a) - a * a * phi
        assert r.norm() < 1e-6


def test_apply_L_checks_grid(grid):
    op = dx.soliton_operator(1.0, grid)
    other = Grid1D(-10, 10, 501)
    with pytest.raises(GridMismatchError):
        dx.apply_L(fp.psi_n(0, other, 0.0), op)
    with pytest.raises(ValueError):
        dx.apply_L(fp.psi_n(0, grid, 0.0), op, "sideways")


def test_phi_n_equals_L_psi_n(grid):
    op = dx.soliton_operator(1.3, grid, 0.4)
    for n in (0, 4, 7):
        fd = dx.apply_L(fp.psi_n(n, grid, 0.4), op)
        assert (fd - dx.phi_n(n, grid, 0.4, 1.3)).norm() < 1e-9


@pytest.mark.parametrize("t", [0.0, 1.3])
def test_bound_state(grid, t):
    b = dx.phi_minus1(1.0, grid, t)
    assert (dx.apply_h1(b, 1.0) + b).norm() < 1e-6
    assert abs(b.norm() - 1) < 1e-10
    assert abs(b.values[1000]) ** 2 == pytest.approx(0.5, abs=1e-14)


def test_bound_state_orthogonal_to_range_of_L(grid):
    b = dx.phi_minus1(1.0, grid, 0.2)
    for f in dx.phi_basis(5, grid, 0.2, 1.0):
        assert abs(inner_product(b, f)) < 1e-10


def test_scattering_state(grid):
    f = dx.phi_p(1.2, grid, 0.5, 1.0)
    r = dx.apply_h1(f, 1.0) - 1.44 * f
    assert np.abs(r.values[5:-5]).max() < 1e-6
    assert abs(f.values[0]) * math.sqrt(2 * math.pi) == pytest.approx(1.0, abs=1e-12)


def test_biorthogonality(grid, nodes):
    etas = dx.eta_basis(8, grid, 1.3, 1.0, nodes)
    phis = dx.phi_basis(8, grid, 1.3, 1.0)
    b = np.array([[inner_product(e, f) for f in phis] for e in etas])
    assert np.abs(b - np.eye(9)).max() < 1e-6


def test_M_inverts_adjoint_of_L(grid, nodes):
    psi = fp.psi_n(2, grid, 0.0)
    m = dx.apply_spectral(psi, dx.spectral_kernel("M", grid, 0.0, 1.0, nodes))
    op = dx.soliton_operator(1.0, grid, 0.0)
    assert (dx.apply_L(m, op, "adjoint") - psi).norm() < 1e-8


def test_spectral_kernel_rejects_unknown(grid):
    with pytest.raises(ValueError, match="unknown spectral kernel"):
        dx.spectral_kernel("Q", grid, 0.0, 1.0)


def test_spectral_time_mismatch(grid):
    kernel = dx.spectral_kernel("U", grid, 0.0, 1.0)
    with pytest.raises(GridMismatchError):
        dx.apply_spectral(fp.psi_n(0, grid, 1.0), kernel)


def test_boundary_warning_for_slow_tails(grid):
    f = SampledState(grid, 0.0, 1 / np.cosh(0.3 * grid.x))
    with pytest.warns(BoundaryTruncationWarning):
        dx.apply_spectral(f, dx.spectral_kernel("U_adj", grid, 0.0, 1.0))


def test_isometry_of_U(grid, nodes):
    psis = fp.psi_basis(3, grid, 0.0)
    u = dx.spectral_kernel("U", grid, 0.0, 1.0, nodes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryTruncationWarning)
        images = [dx.apply_spectral(p, u) for p in psis]
        for m in range(4):
            for n in range(4):
                g = dx.inner_product_1(images[m], images[n], 1.0, nodes)
                assert abs(g - (m == n)) < 1e-6


def test_coherent_paths_agree(grid, nodes):
    params = fp.CoherentParams(0.7 + 0.4j, 25)
    a = dx.phi_z(params, grid, 0.3)
    b = dx.phi_z(params, grid, 0.3, path="operator")
    assert (a - b).norm() < 1e-8
    c = dx.eta_z(params, grid, 0.3, nodes=nodes)
    d = dx.eta_z(params, grid, 0.3, path="operator", nodes=nodes)
    assert (c - d).norm() < 1e-10
    with pytest.raises(ValueError):
        dx.phi_z(params, grid, 0.3, path="other")
