"""Grids, quadrature, finite differences and plane-wave transforms.

Every other module samples its functions on a :class:`Grid1D` and integrates
with :func:`inner_product`.  Derivatives use central stencils of order
:data:`STENCIL_ORDER` (one-sided windows of the same width at the edges).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import BoundaryTruncationWarning, ConfigurationError, GridMismatchError

STENCIL_ORDER = 8
MIN_POINTS = 16
BOUNDARY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max):
            raise ConfigurationError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ConfigurationError(
                f"reversed bounds: x_min={self.x_min} must be below x_max={self.x_max}"
            )
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise ConfigurationError(
                f"n_points={self.n_points} too small, need an integer >= {MIN_POINTS}"
            )

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)

    @cached_property
    def weights(self) -> np.ndarray:
        return simpson_weights(self.n_points, self.spacing)


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n))


@dataclass(frozen=True, eq=False)
class SampledState:
    """Complex samples of a wavefunction on ``grid`` at ``time``."""

    grid: Grid1D
    time: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values has shape {values.shape}, grid has {self.grid.n_points} points"
            )
        object.__setattr__(self, "values", values)

    def with_values(self, values) -> "SampledState":
        return SampledState(self.grid, self.time, values)

    def _check(self, other: "SampledState"):
        check_compatible(self, other)

    def __add__(self, other):
        self._check(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.with_values(self.values / scalar)

    def __neg__(self):
        return self.with_values(-self.values)

    def norm(self) -> float:
        return float(np.sqrt(max(inner_product(self, self).real, 0.0)))

    def boundary_magnitude(self) -> float:
        return float(max(abs(self.values[0]), abs(self.values[-1])))


def check_compatible(f: SampledState, g: SampledState):
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")
    if f.time != g.time:
        raise GridMismatchError(f"time mismatch: t={f.time} vs t={g.time}")


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights; an odd interval count closes with the 3/8 rule."""
    w = np.zeros(n)
    intervals = n - 1
    simpson_end = n if intervals % 2 == 0 else n - 3
    m = simpson_end - 1
    if m > 0:
        w[:simpson_end:2] += 2.0
        w[1:simpson_end:2] = 4.0
        w[0] = w[simpson_end - 1] = 1.0
        w[:simpson_end] *= h / 3.0
    if simpson_end != n:
        w[n - 4 : n] += np.array([3.0, 9.0, 9.0, 3.0]) * h / 8.0
    return w


def integrate(values, grid: Grid1D) -> complex:
    return complex(np.dot(grid.weights, values))


def inner_product(f: SampledState, g: SampledState) -> complex:
    """<f|g> = integral of conj(f) g dx."""
    check_compatible(f, g)
    return complex(np.dot(f.grid.weights, np.conj(f.values) * g.values))


# -- finite differences ------------------------------------------------------


def fornberg_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for ``order``-th derivative at 0 on ``offsets``.

    Fornberg's recursion (Math. Comp. 1988); offsets in units of the spacing.
    """
    offsets = np.asarray(offsets, dtype=float)
    n = len(offsets)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, offsets[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, offsets[i]
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def _stencil(order: int, accuracy: int):
    half = (order + 1) // 2 - 1 + accuracy // 2
    offsets = np.arange(-half, half + 1)
    central = fornberg_weights(offsets, order)
    width = len(offsets)
    # one-sided windows for the first/last `half` points
    left = [fornberg_weights(np.arange(width) - i, order) for i in range(half)]
    return half, central, left


def deriv_array(values: np.ndarray, spacing: float, order: int = 1,
                accuracy: int = STENCIL_ORDER) -> np.ndarray:
    if order not in (1, 2, 3):
        raise ValueError(f"unsupported derivative order {order}; expected 1, 2 or 3")
    values = np.asarray(values)
    n = values.shape[-1]
    half, central, left = _stencil(order, accuracy)
    width = 2 * half + 1
    if n < width:
        raise ConfigurationError(f"grid of {n} points is narrower than the {width}-point stencil")
    out = np.zeros_like(values, dtype=np.result_type(values, float))
    interior = slice(half, n - half)
    for k, w in enumerate(central):
        out[..., interior] += w * values[..., k : n - width + 1 + k]
    for i, w in enumerate(left):
        out[..., i] = values[..., :width] @ w
        # mirrored window at the right edge: derivative of odd order flips sign
        out[..., n - 1 - i] = values[..., n - width :][..., ::-1] @ w * (-1) ** order
    return out / spacing**order


def deriv_x(f: SampledState, order: int = 1) -> SampledState:
    return f.with_values(deriv_array(f.values, f.grid.spacing, order))


def time_derivative(state_at, t: float, dt: float = 1e-4) -> SampledState:
    """Symmetric five-point difference of ``state_at(t)`` in time."""
    fm2, fm1 = state_at(t - 2 * dt), state_at(t - dt)
    fp1, fp2 = state_at(t + dt), state_at(t + 2 * dt)
    d = (fm2.values - 8 * fm1.values + 8 * fp1.values - fp2.values) / (12 * dt)
    return SampledState(fp1.grid, t, d)


# -- plane waves ---------------------------------------------------------------


@dataclass(frozen=True)
class MomentumNodes:
    """Uniform momentum nodes on [-p_max, p_max] with trapezoid weights."""

    p_max: float = 12.0
    n_nodes: int = 1025

    def __post_init__(self):
        if self.p_max <= 0 or self.n_nodes < 3:
            raise ConfigurationError("momentum nodes need p_max > 0 and at least 3 nodes")

    @cached_property
    def p(self) -> np.ndarray:
        return np.linspace(-self.p_max, self.p_max, self.n_nodes)

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.n_nodes, 2 * self.p_max / (self.n_nodes - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def plane_wave_values(p, x, t: float) -> np.ndarray:
    """(2 pi)^(-1/2) exp(i p x - i p^2 t); rows follow ``p`` when it is an array."""
    p = np.asarray(p, dtype=float)
    phase = np.multiply.outer(p, x) - (p**2 * t)[..., None] if p.ndim else p * x - p**2 * t
    return np.exp(1j * phase) / np.sqrt(2 * np.pi)


def fourier_coefficients(f: SampledState, p_nodes, threshold: float = BOUNDARY_THRESHOLD
                         ) -> np.ndarray:
    """<psi_p|f> for every p in ``p_nodes`` by quadrature on f's grid.

    Warns with :class:`BoundaryTruncationWarning` when f is not negligible at
    the window edges (relative to its peak).
    """
    p_nodes = np.atleast_1d(np.asarray(p_nodes, dtype=float))
    peak = np.max(np.abs(f.values))
    if peak > 0 and f.boundary_magnitude() > threshold * peak:
        warnings.warn(
            f"state at t={f.time} has boundary magnitude {f.boundary_magnitude():.3e} "
            f"(peak {peak:.3e}); Fourier integral truncated",
            BoundaryTruncationWarning,
            stacklevel=2,
        )
    kernel = np.conj(plane_wave_values(p_nodes, f.grid.x, f.time))
    return kernel @ (f.grid.weights * f.values)


# -- plane quadrature ----------------------------------------------------------


@dataclass(frozen=True)
class ComplexPlaneQuadrature:
    """Nodes z and weights for integrals over the plane with dx dy.

    ``scheme="polar"``: Gauss-Legendre in r on [0, radius] times the
    trapezoid rule in the angle.  ``scheme="hermite"``: tensor Gauss-Hermite
    in x and y (``n_radial`` nodes per axis), weights rescaled to Lebesgue
    measure; ``radius`` only feeds the tail estimate.
    """

    radius: float = 9.0
    n_radial: int = 80
    n_angular: int = 64
    scheme: str = "polar"

    def __post_init__(self):
        if self.radius <= 0 or self.n_radial < 1 or self.n_angular < 1:
            raise ConfigurationError("plane quadrature needs radius > 0 and positive node counts")
        if self.scheme not in ("polar", "hermite"):
            raise ConfigurationError(f"unknown plane quadrature scheme {self.scheme!r}")

    @cached_property
    def nodes(self):
        if self.scheme == "polar":
            r, wr = np.polynomial.legendre.leggauss(self.n_radial)
            r = 0.5 * self.radius * (r + 1.0)
            wr = 0.5 * self.radius * wr * r
            theta = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
            wt = np.full(self.n_angular, 2 * np.pi / self.n_angular)
            z = np.multiply.outer(r, np.exp(1j * theta)).ravel()
            w = np.multiply.outer(wr, wt).ravel()
        else:
            u, wu = np.polynomial.hermite.hermgauss(self.n_radial)
            wu = wu * np.exp(u**2)
            z = (u[:, None] + 1j * u[None, :]).ravel()
            w = np.multiply.outer(wu, wu).ravel()
        return z, w

    def integrate(self, fn) -> complex:
        z, w = self.nodes
        return complex(np.dot(w, fn(z)))

    def describe(self) -> dict:
        return {"scheme": self.scheme, "radius": self.radius,
                "n_radial": self.n_radial, "n_angular": self.n_angular}
