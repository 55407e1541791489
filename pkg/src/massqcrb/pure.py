"""Mass sensitivity of pure probe states.

For small epsilon the fidelity between the states evolved with and without
the adsorbed mass behaves as ``F = 1 + epsilon**2 * f``.  ``fisher_f``
evaluates the coefficient ``f`` for arbitrary amplitudes; the ``f_*``
functions are closed forms for special families and serve as checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oscillator import (
    NORM_TOL,
    Perturbation,
    StateVector,
    _check_tau,
    as_coeffs,
    evolve_in_perturbed_frame,
    free_phases,
    working_dim,
)

# |f| below this is treated as "no information"
ZERO_F = 1e-15
POSITIVE_F_TOL = 1e-12


@dataclass(frozen=True)
class SensitivityResult:
    f_value: float
    tau: float
    n_measurements: int
    delta_m_over_m: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.delta_m_over_m)

    @property
    def inverse(self) -> float:
        """M / dM_min, zero when nothing can be resolved."""
        return 0.0 if self.is_infinite else 1.0 / self.delta_m_over_m


def _padded(c: np.ndarray, extra: int) -> np.ndarray:
    out = np.zeros(c.size + extra, dtype=complex)
    out[: c.size] = c
    return out


def fisher_f(state, tau: float) -> float:
    """Second-order fidelity coefficient f for a normalized pure state."""
    tau = _check_tau(tau)
    c = as_coeffs(state)
    norm = float(np.vdot(c, c).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
    dim = c.size
    cp = _padded(c, 4)
    m = np.arange(dim, dtype=float)
    c0, c2, c4 = cp[:dim], cp[2 : dim + 2], cp[4 : dim + 4]
    w = np.expm1(2j * tau)  # e^{2i tau} - 1
    p = np.abs(c0) ** 2
    s2 = np.sqrt((m + 1) * (m + 2))

    # coherence part of the bracket, without the tau <m> term
    b0 = math.fsum(0.5 * s2 * np.imag(c0 * np.conj(c2) * w))
    mean = math.fsum(m * p)
    # tau^2 (<m>^2 - <m^2>) regrouped as -tau^2 Var(m): both pieces grow like tau^2
    var = math.fsum(p * (m - mean) ** 2)
    diag = math.fsum((m * m + m + 1) * p) * 0.5 * math.sin(tau) ** 2
    delta2 = tau * math.fsum(np.sqrt((m + 1) ** 3 * (m + 2)) * np.imag(-w * np.conj(c2) * c0))
    delta4 = 0.125 * math.fsum(np.sqrt((m + 1) * (m + 2) * (m + 3) * (m + 4)) * np.real(w * w * c0 * np.conj(c4)))
    return math.fsum([b0 * b0, 2.0 * b0 * tau * mean, -tau * tau * var, -diag, delta2, delta4])


def fisher_forms(dim: int, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian matrices B, Q with ``fisher_f(c) = (c^H B c)**2 - c^H Q c``."""
    tau = _check_tau(tau)
    w = np.expm1(2j * tau)
    m = np.arange(dim, dtype=float)
    B = np.diag(tau * m).astype(complex)
    Q = np.diag((m * m + m + 1) * 0.5 * math.sin(tau) ** 2 + m * m * tau * tau).astype(complex)
    if dim > 2:
        k = m[: dim - 2]
        b2 = 0.5 * np.sqrt((k + 1) * (k + 2)) * w / 2j
        q2 = np.sqrt((k + 1) ** 3 * (k + 2)) * tau * w / 2j
        idx = np.arange(dim - 2)
        B[idx + 2, idx] = b2
        B[idx, idx + 2] = np.conj(b2)
        Q[idx + 2, idx] = q2
        Q[idx, idx + 2] = np.conj(q2)
    if dim > 4:
        k = m[: dim - 4]
        q4 = -np.sqrt((k + 1) * (k + 2) * (k + 3) * (k + 4)) / 16.0 * w * w
        idx = np.arange(dim - 4)
        Q[idx + 4, idx] = q4
        Q[idx, idx + 4] = np.conj(q4)
    return B, Q


def min_mass_ratio(f: float, n_measurements: int = 1, tau: float = math.nan) -> SensitivityResult:
    """dM_min / M = 1 / (sqrt(N) |f|^(1/2))."""
    if n_measurements < 1:
        raise ValueError("need at least one measurement")
    if f > POSITIVE_F_TOL:
        raise ValueError(f"f = {f} > 0 would mean a fidelity above one")
    if abs(f) <= ZERO_F:
        ratio = math.inf
    else:
        ratio = 1.0 / (math.sqrt(n_measurements) * math.sqrt(abs(f)))
    return SensitivityResult(float(f), float(tau), int(n_measurements), ratio)


def pure_min_mass(state, tau: float, n_measurements: int = 1) -> SensitivityResult:
    return min_mass_ratio(fisher_f(state, tau), n_measurements, tau)


def f_fock(n: int, tau: float) -> float:
    return -0.5 * (n * n + n + 1) * math.sin(tau) ** 2


def f_cat_s1(n: int, tau: float) -> float:
    """f for (|n> + |n+2>)/sqrt(2)."""
    return ((n + 1) * (n + 2) * math.sin(2 * tau) ** 2 - 8 * (n * n + 3 * n + 4) * math.sin(tau) ** 2) / 16.0 - tau * tau


def f_cat_s2(n: int, tau: float) -> float:
    """f for (|n> + |n+4>)/sqrt(2)."""
    s2 = math.sin(tau) ** 2
    root = math.sqrt((n + 1) * (n + 2) * (n + 3) * (n + 4))
    return -0.25 * (2 * (n * n + 5 * n + 11) * s2 + root * math.cos(2 * tau) * s2) - 4 * tau * tau


def f_coherent(alpha: float, tau: float) -> float:
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    a2 = alpha * alpha
    return -(0.5 + a2) * math.sin(tau) ** 2 - a2 * tau * (tau + math.sin(2 * tau))


def f_on_asymptotic(L: int, tau: float) -> float:
    """Large-tau value of f for the ON state (|0> + |L>)/sqrt(2)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return -0.25 * tau * tau * L * L


def fidelity_finite_eps(state, tau: float, perturbation: Perturbation) -> float:
    """|<psi(t)|psi_tilde(t)>|^2 at finite epsilon, by explicit evolution."""
    tau = _check_tau(tau)
    st = state if isinstance(state, StateVector) else StateVector(state)
    dim = working_dim(st.top_index, perturbation)
    evolved = evolve_in_perturbed_frame(st, tau, perturbation, dim=dim).coeffs
    free = free_phases(tau, dim) * st.padded(dim)
    return float(abs(np.vdot(free, evolved)) ** 2)
