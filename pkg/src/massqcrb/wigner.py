"""Wigner function of pure oscillator states on a phase-space grid.

Lengths are in units of the oscillator length, momenta in hbar over that
length.  The y-integral of the Wigner transform is done by Gauss-Hermite
quadrature: for a finite Fock superposition the integrand is a Gaussian
times a polynomial times exp(-2iyp).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .oscillator import StateVector, as_coeffs

NORMALIZATION_TOL = 1e-4


def eigenfunctions(n_max: int, x) -> np.ndarray:
    """phi_0..phi_{n_max}(x) stacked along a new leading axis (normalized recurrence)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def eigenfunction(n: int, x) -> np.ndarray:
    if n < 0:
        raise ValueError("n must be non-negative")
    return eigenfunctions(n, x)[n]


def wavefunction(state, x) -> np.ndarray:
    c = as_coeffs(state)
    phi = eigenfunctions(c.size - 1, x)
    return np.tensordot(c, phi, axes=1)


def wigner_at(state, x, p, nodes: int = 128) -> np.ndarray:
    """W(x, p) at matching arrays of points, with the imaginary residue dropped."""
    w = _wigner_complex(state, np.asarray(x, float).ravel(), np.asarray(p, float).ravel(), nodes, pairwise=True)
    return w.real.reshape(np.shape(x))


def _wigner_complex(state, x, p, nodes, pairwise=False) -> np.ndarray:
    y, wts = np.polynomial.hermite.hermgauss(nodes)
    # psi*(x-y) psi(x+y) carries exp(-x^2 - y^2); divide out the quadrature weight
    minus = wavefunction(state, x[:, None] - y[None, :])
    plus = wavefunction(state, x[:, None] + y[None, :])
    g = np.conj(minus) * plus * (wts * np.exp(y * y))[None, :]
    if pairwise:
        return np.sum(g * np.exp(-2j * np.outer(p, y)), axis=1) / math.pi
    # rows indexed by p, columns by x
    return (np.exp(-2j * np.outer(p, y)) @ g.T) / math.pi


def wigner_fock_form(state, x, p) -> np.ndarray:
    """Same W from the Laguerre matrix elements of |m><n|; independent of the quadrature route."""
    c = as_coeffs(state)
    x = np.asarray(x, float)
    p = np.asarray(p, float)
    r2 = 2.0 * (x * x + p * p)
    theta = np.arctan2(-p, x)
    total = np.zeros(np.broadcast(x, p).shape, dtype=complex)
    for m in range(c.size):
        for n in range(c.size):
            if c[m] == 0 or c[n] == 0:
                continue
            lo, k = (n, m - n) if m >= n else (m, n - m)
            # W of |m><n|, r^2 = 2|alpha|^2; the angle sign matches the y-integral convention
            pref = (-1) ** lo / math.pi * math.exp(0.5 * (gammaln(lo + 1) - gammaln(lo + k + 1)))
            radial = pref * r2 ** (k / 2) * np.exp(-r2 / 2) * eval_genlaguerre(lo, k, r2)
            total += c[m] * np.conj(c[n]) * radial * np.exp(1j * (m - n) * theta)
    return total.real


@dataclass(frozen=True)
class PhaseSpaceGrid:
    x_values: np.ndarray
    p_values: np.ndarray
    values: np.ndarray  # shape (len(p_values), len(x_values))
    imag_residue: float

    @property
    def cell(self) -> float:
        return float((self.x_values[1] - self.x_values[0]) * (self.p_values[1] - self.p_values[0]))

    @property
    def normalization(self) -> float:
        return float(self.values.sum() * self.cell)

    @property
    def normalization_ok(self) -> bool:
        return abs(self.normalization - 1.0) <= NORMALIZATION_TOL


def turning_point(n: int) -> float:
    return math.sqrt(2 * n + 1)


def wigner_grid(state, x_range=(-8.0, 8.0), p_range=None, resolution: int = 256, nodes: int = 128) -> PhaseSpaceGrid:
    """Evaluate W on a uniform resolution x resolution grid; rows are fixed p."""
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    p_range = x_range if p_range is None else p_range
    st = state if isinstance(state, StateVector) else StateVector(state)
    xs = np.linspace(x_range[0], x_range[1], resolution)
    ps = np.linspace(p_range[0], p_range[1], resolution)
    w = _wigner_complex(st, xs, ps, nodes)
    grid = PhaseSpaceGrid(xs, ps, np.ascontiguousarray(w.real), float(np.max(np.abs(w.imag))))
    reach = turning_point(st.top_index) + 4.0
    covered = min(-x_range[0], x_range[1], -p_range[0], p_range[1]) >= reach
    if not covered or not grid.normalization_ok:
        warnings.warn(
            f"phase-space grid may not cover the state: normalization {grid.normalization:.6f}",
            RuntimeWarning,
            stacklevel=2,
        )
    return grid
