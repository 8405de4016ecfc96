"""First-order Darboux engine and its soliton specialization.

A transformation function ``u`` (a solution of the seed equation with
``(ln u / conj u)_xxx = 0``) defines

    L = L1(t) (-u_x / u + d/dx),     L1(t) = exp(2 int_0^t Im(ln u)_xx ds),
    V1 = V0 - (ln |u|^2)_xx.

For ``u = cosh(a x) exp(i a^2 t)`` this gives ``L = -a tanh(a x) + d/dx`` and
the reflectionless well ``V1 = -2 a^2 sech^2(a x)``.  Operators built from
the continuous spectrum (M, U, powers of g0 = L+L) are applied through
momentum-space quadrature; see :class:`SpectralKernel`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import (
    BoundaryTruncationWarning,
    ConfigurationError,
    GridMismatchError,
    InvalidTransformationFunction,
)
from .freeparticle import (
    MAX_N,
    CoherentParams,
    _check_n,
    coherent_coefficients,
    coherent_psi_z,
    psi_basis_values,
    psi_n,
)
from .numerics import (
    BOUNDARY_THRESHOLD,
    Grid1D,
    MomentumNodes,
    SampledState,
    deriv_array,
    deriv_x,
    inner_product,
    plane_wave_values,
    time_derivative,
)


GAUGE_NODES = 24
INTERIOR_MARGIN = 5


def _check_a(a: float):
    if not (np.isfinite(a) and a > 0):
        raise ConfigurationError(f"soliton parameter a must be positive, got {a}")


def logcosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)


# -- transformation functions --------------------------------------------------


@dataclass(frozen=True)
class TransformationFunction:
    """Seed solution ``u(x, t)`` of the initial equation.

    ``log_u`` is optional; when given it is used for every logarithmic
    derivative (and avoids overflow for exponentially growing seeds).
    """

    u: Callable
    log_u: Optional[Callable] = None
    factorization_energy: Optional[float] = None
    V0: Optional[Callable] = None
    name: str = "u"

    def values(self, x, t) -> np.ndarray:
        return np.asarray(self.u(x, t), dtype=complex) * np.ones_like(x, dtype=complex)

    def log_values(self, x, t) -> np.ndarray:
        if self.log_u is not None:
            return np.asarray(self.log_u(x, t), dtype=complex) * np.ones_like(x, dtype=complex)
        v = self.values(x, t)
        return np.log(np.abs(v)) + 1j * np.unwrap(np.angle(v))

    def seed_potential(self, x, t) -> np.ndarray:
        if self.V0 is None:
            return np.zeros_like(x, dtype=float)
        return np.asarray(self.V0(x, t), dtype=float)


def soliton_seed(a: float) -> TransformationFunction:
    _check_a(a)
    return TransformationFunction(
        u=lambda x, t: np.cosh(a * x) * np.exp(1j * a * a * t),
        log_u=lambda x, t: logcosh(a * x) + 1j * a * a * t,
        factorization_energy=-a * a,
        name=f"cosh({a}x)exp(i{a}^2 t)",
    )


def plane_wave_seed(p: float) -> TransformationFunction:
    return TransformationFunction(
        u=lambda x, t: np.exp(1j * (p * x - p * p * t)),
        log_u=lambda x, t: 1j * (p * x - p * p * t),
        factorization_energy=p * p,
        name=f"exp(i{p}x - i{p}^2 t)",
    )


def state_seed(coefficients: dict) -> TransformationFunction:
    """u = sum_n c_n psi_n, sampled through the closed-form basis."""
    n_max = max(coefficients)

    def u(x, t):
        rows = psi_basis_values(n_max, x, t)
        return sum(c * rows[n] for n, c in coefficients.items()).reshape(np.shape(x))

    terms = " + ".join(f"{c}*psi_{n}" for n, c in coefficients.items())
    return TransformationFunction(u=u, name=terms)


@dataclass(frozen=True)
class TransformationDiagnostics:
    name: str
    time: float
    validity_residual: float
    schrodinger_residual: float
    min_modulus: float
    tolerance: float

    @property
    def valid(self) -> bool:
        return self.validity_residual < self.tolerance and self.schrodinger_residual < self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "time": self.time,
            "validity_residual": self.validity_residual,
            "schrodinger_residual": self.schrodinger_residual,
            "min_modulus": self.min_modulus,
            "tolerance": self.tolerance,
            "valid": self.valid,
        }


def find_zero(u: TransformationFunction, grid: Grid1D, t: float):
    """Location of a zero of u on the grid (node or sign flip between nodes), else None."""
    v = u.values(grid.x, t)
    mod = np.abs(v)
    if not np.all(np.isfinite(v)):
        return None
    # a node is a zero when it is negligible next to both neighbours
    neighbours = np.minimum(np.r_[mod[1], mod[:-1]], np.r_[mod[1:], mod[-2]])
    hits = np.flatnonzero((mod == 0) | (mod < 1e-8 * neighbours))
    if hits.size:
        return float(grid.x[hits[0]])
    ratio = v[1:] * np.conj(v[:-1])
    flips = np.flatnonzero(np.abs(np.angle(ratio)) > 0.5 * np.pi)
    if flips.size:
        i = flips[0]
        return float(0.5 * (grid.x[i] + grid.x[i + 1]))
    return None


def validate_u(u: TransformationFunction, grid: Grid1D, t: float = 0.0, dt: float = 1e-4,
               tol: float = 1e-6) -> TransformationDiagnostics:
    """Residuals of the validity condition and of the seed Schroedinger equation.

    Both are maxima over interior nodes (one stencil half-width away from
    the edges) of ``|(ln u/conj u)_xxx|`` and ``|i S_t + S_xx + S_x^2 - V0|``
    with ``S = ln u``.  Raises when u vanishes on the grid.
    """
    where = find_zero(u, grid, t)
    if where is not None:
        raise InvalidTransformationFunction(
            f"transformation function {u.name} vanishes near x={where:.6g}", location=where
        )
    h = grid.spacing
    x = grid.x
    s = u.log_values(x, t)
    validity = 2.0 * np.abs(deriv_array(s.imag, h, 3))
    if u.log_u is not None:
        s_t = time_derivative(lambda tau: SampledState(grid, tau, u.log_values(x, tau)), t, dt).values
    else:
        # u_t / u sidesteps branch jumps of the unwrapped phase between time levels
        u_t = time_derivative(lambda tau: SampledState(grid, tau, u.values(x, tau)), t, dt).values
        s_t = u_t / u.values(x, t)
    s_x = deriv_array(s, h, 1)
    schrod = np.abs(1j * s_t + deriv_array(s, h, 2) + s_x**2 - u.seed_potential(x, t))
    inner = slice(INTERIOR_MARGIN, grid.n_points - INTERIOR_MARGIN)
    return TransformationDiagnostics(
        name=u.name,
        time=t,
        validity_residual=float(validity[inner].max()),
        schrodinger_residual=float(schrod[inner].max()),
        min_modulus=float(np.exp(s.real).min()),
        tolerance=tol,
    )


# -- the operator L ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DarbouxOperator:
    """L = gauge * (log_derivative + d/dx) at a fixed time."""

    grid: Grid1D
    time: float
    log_derivative: np.ndarray = field(repr=False)
    gauge: complex = 1.0


def _im_log_curvature(u: TransformationFunction, grid: Grid1D, t: float) -> float:
    s = u.log_values(grid.x, t)
    curv = deriv_array(s.imag, grid.spacing, 2)
    n = grid.n_points
    return float(np.mean(curv[n // 4 : n - n // 4]))


def gauge_factor(u: TransformationFunction, grid: Grid1D, t: float) -> float:
    """L1(t) with L1(0) = 1."""
    if t == 0:
        return 1.0
    nodes, weights = np.polynomial.legendre.leggauss(GAUGE_NODES)
    times = 0.5 * t * (nodes + 1.0)
    integral = 0.5 * t * sum(w * _im_log_curvature(u, grid, s) for s, w in zip(times, weights))
    return math.exp(2.0 * integral)


def darboux_from_u(u: TransformationFunction, grid: Grid1D, t: float,
                   validate: bool = True, tol: float = 1e-6) -> DarbouxOperator:
    if validate:
        diag = validate_u(u, grid, t, tol=tol)
        if not diag.valid:
            raise InvalidTransformationFunction(
                f"{u.name} is not an admissible transformation function: validity residual "
                f"{diag.validity_residual:.3e}, Schroedinger residual {diag.schrodinger_residual:.3e}"
            )
    s = u.log_values(grid.x, t)
    w = -deriv_array(s, grid.spacing, 1)
    return DarbouxOperator(grid, t, w, gauge_factor(u, grid, t))


def transformed_potential(u: TransformationFunction, grid: Grid1D, t: float = 0.0,
                          validate: bool = True) -> np.ndarray:
    """V1 = V0 - (ln|u|^2)_xx on the grid."""
    if validate:
        darboux_from_u(u, grid, t)
    s = u.log_values(grid.x, t)
    return u.seed_potential(grid.x, t) - 2.0 * deriv_array(s.real, grid.spacing, 2)


def apply_L(f: SampledState, op: DarbouxOperator, direction: str = "forward") -> SampledState:
    if f.grid != op.grid:
        raise GridMismatchError("state and operator live on different grids")
    df = deriv_x(f).values
    if direction == "forward":
        return f.with_values(op.gauge * (op.log_derivative * f.values + df))
    if direction == "adjoint":
        return f.with_values(np.conj(op.gauge) * (np.conj(op.log_derivative) * f.values - df))
    raise ValueError(f"direction must be 'forward' or 'adjoint', got {direction!r}")


def soliton_operator(a: float, grid: Grid1D, t: float = 0.0) -> DarbouxOperator:
    return darboux_from_u(soliton_seed(a), grid, t)


def soliton_potential(a: float, x) -> np.ndarray:
    return -2.0 * a * a / np.cosh(a * np.asarray(x)) ** 2


def apply_h1(f: SampledState, a: float) -> SampledState:
    return f.with_values(-deriv_x(f, 2).values + soliton_potential(a, f.grid.x) * f.values)


def intertwining_residual(state_at: Callable, u: TransformationFunction, grid: Grid1D,
                          t: float, dt: float = 1e-4) -> float:
    """|| L (i d_t - h0) f - (i d_t - h1) L f || for a state family ``state_at(t)``."""

    def op(s):
        return darboux_from_u(u, grid, s, validate=False)

    f = state_at(t)
    free = 1j * time_derivative(state_at, t, dt) + deriv_x(f, 2)
    free = free.with_values(free.values - u.seed_potential(grid.x, t) * f.values)
    left = apply_L(free, op(t))
    lf = apply_L(f, op(t))
    v1 = transformed_potential(u, grid, t, validate=False)
    dlf = time_derivative(lambda s: apply_L(state_at(s), op(s)), t, dt)
    right = 1j * dlf + deriv_x(lf, 2)
    right = right.with_values(right.values - v1 * lf.values)
    return (left - right).norm()


# -- transformed states --------------------------------------------------------


def phi_basis_values(n_max: int, x, t: float, a: float) -> np.ndarray:
    """phi_n = L psi_n for n = 0..n_max.

    Uses d/dx = -(i/2)(a + a+), i.e.
    psi_n' = -(i/2)(sqrt(n) psi_{n-1} + sqrt(n+1) psi_{n+1}).
    """
    psi = psi_basis_values(n_max + 1, x, t)
    out = np.empty((n_max + 1, psi.shape[1]), dtype=complex)
    th = -a * np.tanh(a * np.asarray(x))
    for n in range(n_max + 1):
        d = math.sqrt(n + 1) * psi[n + 1]
        if n:
            d = d + math.sqrt(n) * psi[n - 1]
        out[n] = th * psi[n] - 0.5j * d
    return out


def phi_n(n: int, grid: Grid1D, t: float, a: float = 1.0, max_n: int = MAX_N) -> SampledState:
    _check_a(a)
    _check_n(n + 1, max_n)
    return SampledState(grid, t, phi_basis_values(n, grid.x, t, a)[n])


def phi_basis(n_max: int, grid: Grid1D, t: float, a: float = 1.0,
              max_n: int = MAX_N) -> list[SampledState]:
    _check_a(a)
    _check_n(n_max + 1, max_n)
    return [SampledState(grid, t, row) for row in phi_basis_values(n_max, grid.x, t, a)]


def phi_minus1(a: float, grid: Grid1D, t: float) -> SampledState:
    _check_a(a)
    vals = math.sqrt(a / 2) * np.exp(-1j * a * a * t) / np.cosh(a * grid.x)
    return SampledState(grid, t, vals)


def phi_p_values(p, x, t: float, a: float) -> np.ndarray:
    """phi_p = (p^2 + a^2)^(-1/2) (-a tanh(a x) + i p) psi_p; rows follow ``p``."""
    p = np.asarray(p, dtype=float)
    th = -a * np.tanh(a * np.asarray(x))
    if p.ndim:
        factor = (th[None, :] + 1j * p[:, None]) / np.sqrt(p**2 + a * a)[:, None]
    else:
        factor = (th + 1j * p) / math.sqrt(p * p + a * a)
    return factor * plane_wave_values(p, x, t)


def phi_p(p: float, grid: Grid1D, t: float, a: float = 1.0) -> SampledState:
    _check_a(a)
    return SampledState(grid, t, phi_p_values(float(p), grid.x, t, a))


# -- spectral operators --------------------------------------------------------

FAMILIES = ("psi", "phi")


@lru_cache(maxsize=8)
def _family_matrix(family: str, grid: Grid1D, nodes: MomentumNodes, t: float, a: float):
    if family == "psi":
        return plane_wave_values(nodes.p, grid.x, t)
    return phi_p_values(nodes.p, grid.x, t, a)


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    """int dp multiplier(p) |ket_p><bra_p| discretized on ``nodes``.

    ``bra`` and ``ket`` name the generalized eigenfunction families
    (``"psi"`` plane waves, ``"phi"`` soliton continuum states).
    """

    name: str
    grid: Grid1D
    time: float
    a: float
    nodes: MomentumNodes
    multiplier: np.ndarray = field(repr=False)
    bra: str = "psi"
    ket: str = "psi"

    def __post_init__(self):
        if self.bra not in FAMILIES or self.ket not in FAMILIES:
            raise ValueError(f"families must be among {FAMILIES}")
        if not np.all(np.isfinite(self.multiplier)):
            raise ValueError(f"kernel {self.name} has a non-finite multiplier")

    @cached_property
    def _analysis(self) -> np.ndarray:
        fam = _family_matrix(self.bra, self.grid, self.nodes, self.time, self.a)
        return np.conj(fam) * self.grid.weights

    @cached_property
    def _synthesis(self) -> np.ndarray:
        fam = _family_matrix(self.ket, self.grid, self.nodes, self.time, self.a)
        return (fam * (self.nodes.weights * self.multiplier)[:, None]).T.copy()

    def coefficients(self, values: np.ndarray) -> np.ndarray:
        return self._analysis @ values

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        return self._synthesis @ coefficients


def spectral_kernel(kind: str, grid: Grid1D, t: float, a: float,
                    nodes: Optional[MomentumNodes] = None, power: float = 1.0) -> SpectralKernel:
    """Kernels for L, L+, M, M+, U, U+ and g0**power.

    ======  ============  =====  =====
    kind    multiplier    bra    ket
    ======  ============  =====  =====
    L       N_p           psi    phi
    L_adj   N_p           phi    psi
    M       1/N_p         psi    phi
    M_adj   1/N_p         phi    psi
    U       1             psi    phi
    U_adj   1             phi    psi
    g0      N_p^(2 power) psi    psi
    ======  ============  =====  =====
    """
    _check_a(a)
    nodes = nodes or MomentumNodes()
    n_sq = nodes.p**2 + a * a
    table = {
        "L": (np.sqrt(n_sq), "psi", "phi"),
        "L_adj": (np.sqrt(n_sq), "phi", "psi"),
        "M": (1 / np.sqrt(n_sq), "psi", "phi"),
        "M_adj": (1 / np.sqrt(n_sq), "phi", "psi"),
        "U": (np.ones_like(n_sq), "psi", "phi"),
        "U_adj": (np.ones_like(n_sq), "phi", "psi"),
        "g0": (n_sq**power, "psi", "psi"),
    }
    if kind not in table:
        raise ValueError(f"unknown spectral kernel {kind!r}; expected one of {sorted(table)}")
    mult, bra, ket = table[kind]
    name = kind if kind != "g0" else f"g0^{power:g}"
    return SpectralKernel(name, grid, t, a, nodes, mult.astype(complex), bra, ket)


def apply_spectral(f: SampledState, kernel: SpectralKernel,
                   threshold: float = BOUNDARY_THRESHOLD) -> SampledState:
    if f.grid != kernel.grid or f.time != kernel.time:
        raise GridMismatchError(f"state (t={f.time}) does not match kernel {kernel.name} (t={kernel.time})")
    peak = np.max(np.abs(f.values))
    if peak > 0 and f.boundary_magnitude() > threshold * peak:
        warnings.warn(
            f"input to {kernel.name} has boundary magnitude {f.boundary_magnitude():.3e}",
            BoundaryTruncationWarning,
            stacklevel=2,
        )
    return f.with_values(kernel.synthesize(kernel.coefficients(f.values)))


def eta_basis(n_max: int, grid: Grid1D, t: float, a: float = 1.0,
              nodes: Optional[MomentumNodes] = None, max_n: int = MAX_N) -> list[SampledState]:
    """eta_n = M psi_n for n = 0..n_max."""
    _check_n(n_max, max_n)
    kernel = spectral_kernel("M", grid, t, a, nodes)
    psi = psi_basis_values(n_max, grid.x, t)
    out = kernel.synthesize(kernel.coefficients(psi.T))
    return [SampledState(grid, t, col) for col in out.T]


def eta_n(n: int, grid: Grid1D, t: float, a: float = 1.0,
          nodes: Optional[MomentumNodes] = None, max_n: int = MAX_N) -> SampledState:
    _check_n(n, max_n)
    return apply_spectral(psi_n(n, grid, t, max_n=max_n), spectral_kernel("M", grid, t, a, nodes))


def phi_z(params: CoherentParams, grid: Grid1D, t: float, a: float = 1.0,
          path: str = "series", max_n: int = MAX_N) -> SampledState:
    """phi_z = L psi_z, either as Phi sum a_n z^n phi_n or by applying L to psi_z."""
    _check_a(a)
    if path == "series":
        c = coherent_coefficients(params, max_n=max_n - 1)
        return SampledState(grid, t, c @ phi_basis_values(params.truncation, grid.x, t, a))
    if path == "operator":
        return apply_L(coherent_psi_z(params, grid, t, max_n=max_n), soliton_operator(a, grid, t))
    raise ValueError(f"path must be 'series' or 'operator', got {path!r}")


def eta_z(params: CoherentParams, grid: Grid1D, t: float, a: float = 1.0,
          path: str = "series", nodes: Optional[MomentumNodes] = None,
          max_n: int = MAX_N) -> SampledState:
    """eta_z = M psi_z, either as Phi sum a_n z^n eta_n or by applying M to psi_z."""
    _check_a(a)
    if path == "series":
        c = coherent_coefficients(params, max_n=max_n)
        basis = eta_basis(params.truncation, grid, t, a, nodes, max_n=max_n)
        return SampledState(grid, t, c @ np.array([b.values for b in basis]))
    if path == "operator":
        psi_z = coherent_psi_z(params, grid, t, max_n=max_n)
        return apply_spectral(psi_z, spectral_kernel("M", grid, t, a, nodes))
    raise ValueError(f"path must be 'series' or 'operator', got {path!r}")


def inner_product_1(f: SampledState, g: SampledState, a: float,
                    nodes: Optional[MomentumNodes] = None) -> complex:
    """<f|g>_1 = <M+ f| g0 M+ g>_0 for f, g in the range of L."""
    m_adj = spectral_kernel("M_adj", f.grid, f.time, a, nodes)
    g0 = spectral_kernel("g0", f.grid, f.time, a, nodes)
    pre_f = apply_spectral(f, m_adj)
    pre_g = apply_spectral(g, m_adj)
    return inner_product(pre_f, apply_spectral(pre_g, g0))
