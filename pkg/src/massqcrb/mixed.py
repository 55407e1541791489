"""Density-matrix metrology: fidelity, Bures distance and thermal states.

The quantum Cramer-Rao bound for mixed states needs the derivative of the
Bures distance with respect to epsilon, which is obtained here from
finite-epsilon fidelities and Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .oscillator import (
    Perturbation,
    StateVector,
    _check_tau,
    as_coeffs,
    free_phases,
    perturbed_propagator,
    working_dim,
)
from .pure import SensitivityResult, min_mass_ratio

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
THERMAL_TAIL_TOL = 1e-12
# 1 - sqrt(F) is resolved to about this many machine epsilons
_ROOT_FIDELITY_NOISE = 16.0 * np.finfo(float).eps
# d_Bures/eps at eps0, eps0/2, ... ; a large first step keeps 1 - sqrt(F) well above round-off
DEFAULT_EPS0 = 8e-3
DEFAULT_LEVELS = 4


class ConvergenceError(RuntimeError):
    """A finite-difference estimate did not settle."""


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(rho)[0])
        if lowest < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lowest:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def top_index(self) -> int:
        occupied = np.flatnonzero(np.abs(np.diag(self.matrix)) > 0)
        return int(occupied[-1]) if occupied.size else 0

    @classmethod
    def from_state(cls, state) -> "DensityMatrix":
        c = as_coeffs(state)
        return cls(np.outer(c, c.conj()))

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        dim = max(as_coeffs(s).size for s in states)
        rho = np.zeros((dim, dim), dtype=complex)
        for p, s in zip(weights, states):
            c = np.zeros(dim, dtype=complex)
            cs = as_coeffs(s)
            c[: cs.size] = cs
            rho += p * np.outer(c, c.conj())
        return cls(rho)

    def padded(self, dim: int) -> np.ndarray:
        if dim < self.dim:
            return self.matrix[:dim, :dim].copy()
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.matrix
        return out


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    if isinstance(rho, StateVector) or np.ndim(rho) == 1:
        return DensityMatrix.from_state(rho).matrix
    return DensityMatrix(rho).matrix


@dataclass(frozen=True)
class ThermalSpec:
    """Thermal occupation at inverse temperature z = hbar omega / (k_B T)."""

    z: float
    dim: int | None = None

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError("z must be positive")
        need = self.required_dim(self.z)
        if self.dim is None:
            object.__setattr__(self, "dim", need)
        elif self.dim < need:
            raise ValueError(
                f"dim={self.dim} leaves thermal tail above {THERMAL_TAIL_TOL:g} at z={self.z}; need dim >= {need}"
            )

    @staticmethod
    def required_dim(z: float, tail_tol: float = THERMAL_TAIL_TOL) -> int:
        # the discarded weight beyond dim is exactly exp(-z dim)
        dim = max(1, math.ceil(-math.log(tail_tol) / z))
        while math.exp(-z * dim) >= tail_tol:
            dim += 1
        return dim

    def weights(self) -> np.ndarray:
        n = np.arange(self.dim)
        return np.exp(-n * self.z) * -math.expm1(-self.z)


def thermal_state(spec: ThermalSpec) -> DensityMatrix:
    p = spec.weights()
    return DensityMatrix(np.diag(p / p.sum()))


def _matrix_sqrt_psd(rho: np.ndarray, drop_noise: bool = False) -> np.ndarray:
    """Square root via eigh with negative eigenvalues clipped to 0.

    With ``drop_noise`` eigenvalues below the eigh resolution dim * eps * max
    are zeroed too: their square roots (~1e-8) would otherwise enter a
    fidelity between two different matrices at first order.
    """
    vals, vecs = np.linalg.eigh(rho)
    cut = rho.shape[0] * np.finfo(float).eps * max(vals[-1], 0.0) if drop_noise else 0.0
    vals = np.where(vals > cut, vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _nuclear_norm(a: np.ndarray) -> float:
    return math.fsum(np.linalg.svd(a, compute_uv=False))


def root_fidelity(rho1, rho2) -> float:
    """sqrt(F) = tr sqrt(sqrt(rho1) rho2 sqrt(rho1)), as the trace norm of sqrt(rho1) sqrt(rho2)."""
    a = _as_matrix(rho1)
    b = _as_matrix(rho2)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return _nuclear_norm(_matrix_sqrt_psd(a, True) @ _matrix_sqrt_psd(b, True))


def fidelity(rho1, rho2) -> float:
    return root_fidelity(rho1, rho2) ** 2


def bures_distance(rho1, rho2) -> float:
    return math.sqrt(2.0) * math.sqrt(max(0.0, 1.0 - root_fidelity(rho1, rho2)))


def evolve_density(rho, tau: float, perturbation: Perturbation, dim: int | None = None) -> DensityMatrix:
    """V rho V^dagger with V the (possibly perturbed) propagator in the unperturbed basis."""
    tau = _check_tau(tau)
    r = rho if isinstance(rho, DensityMatrix) else DensityMatrix(_as_matrix(rho))
    dim = working_dim(r.top_index, perturbation) if dim is None else dim
    mat = r.padded(dim)
    if perturbation.epsilon == 0.0:
        V = np.diag(free_phases(tau, dim))
    else:
        V = perturbed_propagator(tau, perturbation, dim)
    out = V @ mat @ V.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def _relative_propagator(tau: float, perturbation: Perturbation, dim: int) -> np.ndarray:
    """U_0(t)^dagger U_tilde(t) on the working space."""
    return free_phases(tau, dim).conj()[:, None] * perturbed_propagator(tau, perturbation, dim)


def richardson(values: list[float], ratio: float = 2.0) -> tuple[float, float]:
    """Eliminate successive integer powers of the step; values at h, h/ratio, h/ratio^2, ...

    Returns the extrapolated value and the difference between the two most
    refined estimates as an error indicator.
    """
    table = list(values)
    prev = table[-1]
    for k in range(1, len(values)):
        fac = ratio**k
        prev = table[-1]
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
    return table[0], abs(table[0] - prev)


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    error: float


def bures_derivative(initial, tau: float, eps0: float = DEFAULT_EPS0, levels: int = DEFAULT_LEVELS) -> DerivativeEstimate:
    """d d_Bures(rho(omega, t), rho(omega_tilde, t)) / d epsilon at epsilon -> 0.

    d_Bures/epsilon is sampled at eps0, eps0/2, ... and Richardson-combined.
    """
    tau = _check_tau(tau)
    if not 1e-5 <= eps0 <= 1e-2:
        raise ValueError("eps0 must lie in [1e-5, 1e-2]")
    if levels < 2:
        raise ValueError("need at least two step sizes")
    r = initial if isinstance(initial, DensityMatrix) else DensityMatrix(_as_matrix(initial))
    dim = working_dim(r.top_index, Perturbation(eps0))
    root = _matrix_sqrt_psd(r.padded(dim))
    samples = []
    for i in range(levels):
        eps = eps0 / 2**i
        V = _relative_propagator(tau, Perturbation(eps), dim)
        # fidelity is invariant under the common free evolution U_0(t), and
        # sqrt(rho) V sqrt(rho) V^dagger has the same singular values as sqrt(rho) V sqrt(rho)
        sqrt_f = _nuclear_norm(root @ V @ root)
        samples.append(math.sqrt(2.0) * math.sqrt(max(0.0, 1.0 - sqrt_f)) / eps)
    value, err = richardson(samples)
    # round-off in 1 - sqrt(F) limits d/eps to ~sqrt(2 noise)/eps; Richardson weights add < 3x
    floor = 3.0 * math.sqrt(2.0 * _ROOT_FIDELITY_NOISE) / (eps0 / 2 ** (levels - 1))
    if abs(value) <= floor:
        return DerivativeEstimate(0.0, max(err, floor))
    if err > 0.01 * abs(value) and err > floor:
        raise ConvergenceError(
            f"Bures derivative not converged (value {value:.6g}, error {err:.2e}); try another eps0"
        )
    return DerivativeEstimate(value, err)


def mixed_min_mass(rho, tau: float, n_measurements: int = 1, eps0: float = DEFAULT_EPS0) -> SensitivityResult:
    """dM_min/M = 1/(sqrt(N) d'(0)); with epsilon = dM/(2M) the factors of two cancel."""
    d = bures_derivative(rho, tau, eps0).value
    return min_mass_ratio(-d * d, n_measurements, tau)


def thermal_min_mass(spec: ThermalSpec, tau: float, n_measurements: int = 1, eps0: float = DEFAULT_EPS0) -> SensitivityResult:
    return mixed_min_mass(thermal_state(spec), tau, n_measurements, eps0)


@dataclass(frozen=True)
class ConvexityBound:
    """Upper bounds on d'(0) for a thermal state.

    ``series`` is sum_n p_n |f_n|^(1/2) and ``envelope`` its closed form
    |sin tau| / (sqrt(2)(1 - e^-z)).  Only the Fisher information (|f|, not
    its root) is convex, so ``root_series`` = (sum_n p_n |f_n|)^(1/2) is the
    bound that holds for every z; ``series`` can sit below the exact value
    once the excited populations are small.
    """

    series: float
    envelope: float
    root_series: float


def thermal_convexity_bound(spec: ThermalSpec, tau: float) -> ConvexityBound:
    tau = _check_tau(tau)
    n = np.arange(spec.dim, dtype=float)
    p = spec.weights()
    fock = 0.5 * (n * n + n + 1)
    s = abs(math.sin(tau))
    series = s * math.fsum(p * np.sqrt(fock))
    envelope = s / (math.sqrt(2.0) * -math.expm1(-spec.z))
    root_series = s * math.sqrt(math.fsum(p * fock))
    return ConvexityBound(series, envelope, root_series)


def x2_static_statistics(z: float) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Mean and variance of x^2 (units hbar/sqrt(DM)) in the thermal state of the loaded oscillator.

    With fixed spring constant and temperature, the loaded oscillator has
    M -> M/(1-eps)^2 and z -> z (1-eps); <x^2> = (1-eps) coth(z(1-eps)/2) / 2 and
    the x^2 fluctuations are sqrt(2) times the mean.
    """

    def mean(eps: float) -> float:
        return 0.5 * (1.0 - eps) / math.tanh(0.5 * z * (1.0 - eps))

    def var(eps: float) -> float:
        return 2.0 * mean(eps) ** 2

    return mean, var


def _sinh_minus_identity(z: float) -> float:
    """sinh z - z without the cancellation at small z."""
    if z >= 0.5:
        return math.sinh(z) - z
    term, total, k = z, 0.0, 1
    while True:
        term *= z * z / ((2 * k) * (2 * k + 1))
        if term <= 1e-17 * total:
            return total
        total += term
        k += 1


def x2_measurement_bound(spec: ThermalSpec | float, n_measurements: int = 1) -> float:
    """Achievable dM/M from measuring x^2 on the thermal state: 2 sqrt(2/N) sinh z / (sinh z - z)."""
    z = spec.z if isinstance(spec, ThermalSpec) else float(spec)
    if not z > 0:
        raise ValueError("z must be positive")
    # relative slope (sinh z - z) / sinh z; below machine precision it cannot be resolved
    rel_slope = 1.0 if z > 700 else _sinh_minus_identity(z) / math.sinh(z)
    if rel_slope <= np.finfo(float).eps:
        return math.inf
    # built from <x^2> = coth(z/2)/2 and std(x^2) = coth(z/2)/sqrt(2) in units hbar/sqrt(DM)
    mean = 0.5 / math.tanh(0.5 * z)
    std = mean * math.sqrt(2.0)
    slope = mean * rel_slope
    # slope is |d<x^2>/d eps|; dM/M = 2 d eps
    return 2.0 * std / (math.sqrt(n_measurements) * slope)


def x2_dynamic_statistics(rho, tau: float) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Mean and variance of x^2 (units of the unperturbed oscillator length) after evolving rho for tau."""
    r = rho if isinstance(rho, DensityMatrix) else DensityMatrix(_as_matrix(rho))
    dim = working_dim(r.top_index, Perturbation(1e-2))
    n = np.arange(1, dim + 4)
    a = np.diag(np.sqrt(n), 1)
    x = (a + a.T) / math.sqrt(2.0)
    x2_full = x @ x
    x2 = x2_full[:dim, :dim]
    x4 = (x2_full @ x2_full)[:dim, :dim]
    free = evolve_density(r, tau, Perturbation(0.0), dim=dim).matrix
    var0 = float(np.trace(free @ x4).real) - float(np.trace(free @ x2).real) ** 2

    def mean(eps: float) -> float:
        evolved = evolve_density(r, tau, Perturbation(eps), dim=dim).matrix
        return float(np.trace(evolved @ x2).real)

    def var(eps: float) -> float:
        if eps != 0.0:
            raise ValueError("only the unperturbed variance is needed")
        return var0

    return mean, var


def observable_cramer_rao(
    mean_at: Callable[[float], float],
    var_at: Callable[[float], float],
    n_measurements: int = 1,
    eps0: float = 1e-3,
    levels: int = 3,
) -> float:
    """dM/M achievable by estimating epsilon from the mean of an observable A.

    d eps = sqrt(Var A / N) / |d<A>/d eps|, with the slope from one-sided
    differences at eps0, eps0/2, ... and Richardson extrapolation.
    """
    m0 = mean_at(0.0)
    slopes = [(mean_at(eps0 / 2**i) - m0) / (eps0 / 2**i) for i in range(levels)]
    slope, err = richardson(slopes)
    var0 = var_at(0.0)
    floor = 1e-9 * max(1.0, abs(m0), math.sqrt(max(var0, 0.0)))
    if abs(slope) <= max(floor, 10.0 * err):
        return math.inf
    d_eps = math.sqrt(max(var0, 0.0) / n_measurements) / abs(slope)
    return 2.0 * d_eps
