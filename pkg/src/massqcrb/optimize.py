"""Search for the probe state with at most L quanta that maximizes |f|."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .oscillator import StateVector, _check_tau, make_fock, make_on, make_state
from .pure import fisher_f, fisher_forms


@dataclass(frozen=True)
class OptimizationReport:
    best_state: StateVector
    best_f: float
    restarts_used: int
    converged: bool
    spread: float
    L: int
    tau: float


def canonical_phase(c: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Remove the global phase so that the first non-negligible amplitude is real and positive."""
    c = np.asarray(c, dtype=complex)
    nz = np.flatnonzero(np.abs(c) > atol)
    if nz.size == 0:
        return c.copy()
    lead = c[nz[0]]
    out = c * (abs(lead) / lead)
    out[nz[0]] = abs(lead)
    return out


def _objective(x: np.ndarray, B: np.ndarray, Q: np.ndarray) -> tuple[float, np.ndarray]:
    # f of x/|x|; scale invariance keeps the iterate on (a multiple of) the sphere
    n = x.size // 2
    c = x[:n] + 1j * x[n:]
    nn = float(np.vdot(c, c).real)
    Bc = B @ c
    Qc = Q @ c
    b = float(np.vdot(c, Bc).real) / nn
    q = float(np.vdot(c, Qc).real) / nn
    grad_b = 2.0 * (Bc - b * c) / nn
    grad_q = 2.0 * (Qc - q * c) / nn
    g = 2.0 * b * grad_b - grad_q
    return b * b - q, np.concatenate([g.real, g.imag])


def _start_points(L: int, restarts: int, rng: np.random.Generator, extra_starts) -> list[np.ndarray]:
    starts = []
    if L >= 1:
        starts.append(make_on(L).coeffs)
    starts.append(make_fock(L, L + 1).coeffs)
    for s in extra_starts or ():
        c = np.zeros(L + 1, dtype=complex)
        s = np.asarray(s, dtype=complex)[: L + 1]
        c[: s.size] = s
        if np.any(c != 0):
            starts.append(c)
    starts = starts[:restarts]
    while len(starts) < restarts:
        v = rng.standard_normal(L + 1) + 1j * rng.standard_normal(L + 1)
        starts.append(v / np.linalg.norm(v))
    return starts


def optimize_state(
    L: int,
    tau: float,
    restarts: int = 32,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    extra_starts=None,
) -> OptimizationReport:
    """Multi-start maximization of |f| over states supported on |0>..|L>.

    Starts are the ON state, the Fock state |L>, any ``extra_starts`` and
    seeded random points, ``restarts`` in total.  Each start is refined by
    L-BFGS with the analytic gradient of f(c/|c|).
    """
    tau = _check_tau(tau)
    if L < 0:
        raise ValueError("L must be non-negative")
    if restarts < 1:
        raise ValueError("need at least one restart")
    dim = L + 1
    if dim == 1:
        state = make_fock(0, 1)
        return OptimizationReport(state, fisher_f(state, tau), 1, True, 0.0, L, tau)

    B, Q = fisher_forms(dim, tau)
    rng = np.random.default_rng(seed)
    results = []
    for c0 in _start_points(L, restarts, rng, extra_starts):
        x0 = np.concatenate([c0.real, c0.imag])
        res = minimize(
            _objective,
            x0,
            args=(B, Q),
            jac=True,
            method="L-BFGS-B",
            options={"ftol": tol, "gtol": 1e-12, "maxiter": max_iter, "maxcor": 20},
        )
        c = res.x[:dim] + 1j * res.x[dim:]
        state = make_state(c)
        results.append((fisher_f(state, tau), bool(res.success), state))

    # ties go to the earliest start, so the result never depends on evaluation order
    best_i = min(range(len(results)), key=lambda i: (results[i][0], i))
    best_f, ok, best = results[best_i]
    values = np.array([r[0] for r in results])
    return OptimizationReport(
        best_state=StateVector(canonical_phase(best.coeffs)),
        best_f=float(best_f),
        restarts_used=len(results),
        converged=ok,
        spread=float(values.std()),
        L=L,
        tau=tau,
    )


def variance_certificate(state, tau_large: float) -> float:
    """tau^2 Var(n): the dominant part of |f| once tau >> 1."""
    st = state if isinstance(state, StateVector) else StateVector(state)
    return _check_tau(tau_large) ** 2 * st.number_variance()
