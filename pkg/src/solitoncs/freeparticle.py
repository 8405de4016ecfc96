"""Free-particle basis, ladder operators, plane waves and coherent states.

Conventions (h0 = -d^2/dx^2, i d/dt psi = h0 psi):

* lowering ``a = (i - t) d/dx + i x / 2``, raising ``a+ = (i + t) d/dx - i x / 2``;
* ``psi_0`` solves ``a psi_0 = 0``; it is the freely spreading Gaussian
  ``(2 pi)^(-1/4) (1 + i t)^(-1/2) exp(-x^2 / (4 (1 + i t)))``;
* ``psi_n = (a+)^n psi_0 / sqrt(n!)``, evaluated in closed form as
  ``psi_0 * (-i e^{-i theta})^n * He_n(xi)`` with ``theta = arctan t``,
  ``xi = x / sqrt(2 (1 + t^2))`` and ``He_n`` the normalized Hermite
  polynomial ``H_n / sqrt(2^n n!)``;
* plane waves ``psi_p = (2 pi)^(-1/2) exp(i p x - i p^2 t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, TruncationError
from .numerics import (
    Grid1D,
    SampledState,
    deriv_x,
    fourier_coefficients,
    plane_wave_values,
)

MAX_N = 60
COHERENT_TAIL = 1e-12


def _check_n(n: int, max_n: int):
    if int(n) != n or n < 0:
        raise ConfigurationError(f"basis index must be a non-negative integer, got {n}")
    if n > max_n:
        raise TruncationError(f"basis index {n} exceeds the configured maximum {max_n}",
                              required=n)


def hermite_functions(n_max: int, xi: np.ndarray) -> np.ndarray:
    """Rows k = 0..n_max of He_k(xi) * exp(-xi^2 / 2), by the normalized recurrence."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((n_max + 1,) + xi.shape)
    out[0] = np.exp(-0.5 * xi**2)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for k in range(1, n_max):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * xi * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out


def psi_basis_values(n_max: int, x, t: float) -> np.ndarray:
    """psi_0 .. psi_{n_max} sampled at x (rows)."""
    x = np.asarray(x, dtype=float)
    s = 1.0 + t * t
    theta = math.atan(t)
    xi = x / math.sqrt(2.0 * s)
    envelope = (2 * np.pi) ** -0.25 * s**-0.25 * np.exp(
        -0.5j * theta + 1j * x**2 * t / (4.0 * s)
    )
    phases = (-1j * np.exp(-1j * theta)) ** np.arange(n_max + 1)
    return phases[:, None] * hermite_functions(n_max, xi).reshape(n_max + 1, -1) * envelope.ravel()


def psi_n_values(n: int, x, t: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return psi_basis_values(n, x, t)[n].reshape(x.shape)


def psi_n(n: int, grid: Grid1D, t: float, max_n: int = MAX_N) -> SampledState:
    _check_n(n, max_n)
    return SampledState(grid, t, psi_n_values(n, grid.x, t))


def psi_basis(n_max: int, grid: Grid1D, t: float, max_n: int = MAX_N) -> list[SampledState]:
    _check_n(n_max, max_n)
    rows = psi_basis_values(n_max, grid.x, t)
    return [SampledState(grid, t, row) for row in rows]


def apply_ladder(f: SampledState, which: str) -> SampledState:
    t = f.time
    x = f.grid.x
    df = deriv_x(f).values
    if which == "lower":
        return f.with_values((1j - t) * df + 0.5j * x * f.values)
    if which == "raise":
        return f.with_values((1j + t) * df - 0.5j * x * f.values)
    raise ValueError(f"ladder operator must be 'lower' or 'raise', got {which!r}")


def apply_h0(f: SampledState) -> SampledState:
    return -deriv_x(f, 2)


# -- coherent states -----------------------------------------------------------


@dataclass(frozen=True)
class CoherentParams:
    z: complex
    truncation: int = 40

    def __post_init__(self):
        if int(self.truncation) != self.truncation or self.truncation < 1:
            raise ConfigurationError(f"truncation must be a positive integer, got {self.truncation}")
        object.__setattr__(self, "z", complex(self.z))

    @property
    def weight(self) -> float:
        """Phi = exp(-|z|^2 / 2)."""
        return math.exp(-0.5 * abs(self.z) ** 2)


def coherent_tail(z: complex, n: int) -> float:
    """|z|^n / sqrt(n!) evaluated through logarithms."""
    r = abs(z)
    if r == 0:
        return 0.0
    return math.exp(n * math.log(r) - 0.5 * math.lgamma(n + 1))


def required_truncation(z: complex, tail: float = COHERENT_TAIL) -> int:
    n = 1
    while coherent_tail(z, n) >= tail:
        n += 1
    return n


def coherent_coefficients(params: CoherentParams, check: bool = True,
                          max_n: int = MAX_N) -> np.ndarray:
    """Phi * z^n / sqrt(n!) for n = 0..N."""
    z, big_n = params.z, params.truncation
    if check:
        if coherent_tail(z, big_n) >= COHERENT_TAIL:
            need = required_truncation(z)
            raise TruncationError(
                f"truncation N={big_n} too small for |z|={abs(z):.4g}; need N >= {need}",
                required=need,
            )
        if big_n > max_n:
            raise TruncationError(
                f"truncation N={big_n} exceeds the basis maximum {max_n}", required=big_n
            )
    c = np.empty(big_n + 1, dtype=complex)
    c[0] = params.weight
    for n in range(1, big_n + 1):
        c[n] = c[n - 1] * z / math.sqrt(n)
    return c


def coherent_psi_z(params: CoherentParams, grid: Grid1D, t: float,
                   max_n: int = MAX_N) -> SampledState:
    c = coherent_coefficients(params, max_n=max_n)
    rows = psi_basis_values(params.truncation, grid.x, t)
    return SampledState(grid, t, c @ rows)


# -- plane waves and momentum representation ----------------------------------


def plane_wave(p: float, grid: Grid1D, t: float) -> SampledState:
    return SampledState(grid, t, plane_wave_values(float(p), grid.x, t))


def momentum_coeff(n: int, p_nodes, t: float, grid: Grid1D,
                   max_n: int = MAX_N) -> np.ndarray:
    """<psi_p|psi_n> at each node, by quadrature over ``grid`` at time ``t``."""
    return fourier_coefficients(psi_n(n, grid, t, max_n=max_n), p_nodes)


def momentum_coeff_exact(n: int, p_nodes) -> np.ndarray:
    """Closed form of <psi_p|psi_n>; independent of t because both evolve freely."""
    p = np.asarray(p_nodes, dtype=float)
    he = hermite_functions(n, np.sqrt(2.0) * p)[n]
    # exp(-xi^2/2) with xi = sqrt(2) p is exp(-p^2), the full Gaussian
    return (-1) ** n * (2 / np.pi) ** 0.25 * he
