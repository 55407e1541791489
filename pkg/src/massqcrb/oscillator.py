"""Fock-space description of the oscillator before and after mass adsorption.

Everything here is dimensionless: hbar = omega = 1, lengths in units of the
oscillator length.  Adding a mass lowers the frequency to
``omega * (1 - epsilon)`` with ``epsilon = dM / (2 M)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

NORM_TOL = 1e-10


class TruncationError(RuntimeError):
    """The truncated Fock space is too small for the requested accuracy."""


@dataclass(frozen=True)
class StateVector:
    """Pure state given by its amplitudes in the unperturbed Fock basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size < 1:
            raise ValueError("state needs at least one amplitude")
        norm = float(np.vdot(c, c).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @property
    def top_index(self) -> int:
        """Largest occupied Fock index."""
        nz = np.flatnonzero(np.abs(self.coeffs) > 0)
        return int(nz[-1]) if nz.size else 0

    def padded(self, dim: int) -> np.ndarray:
        if dim < self.dim:
            if np.any(self.coeffs[dim:] != 0):
                raise ValueError(f"cannot truncate occupied levels to dim={dim}")
            return self.coeffs[:dim].copy()
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.coeffs
        return out

    def mean_number(self) -> float:
        n = np.arange(self.dim)
        return float(np.sum(n * np.abs(self.coeffs) ** 2))

    def number_variance(self) -> float:
        n = np.arange(self.dim)
        p = np.abs(self.coeffs) ** 2
        mean = np.sum(n * p)
        return float(np.sum(n * n * p) - mean * mean)


def as_coeffs(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.coeffs
    return np.asarray(state, dtype=complex).ravel()


def make_state(raw_coeffs) -> StateVector:
    """Normalize ``raw_coeffs`` into a state, keeping relative phases."""
    c = np.array(raw_coeffs, dtype=complex).ravel()
    norm = math.sqrt(float(np.vdot(c, c).real)) if c.size else 0.0
    if norm == 0.0:
        raise ValueError("zero vector")
    return StateVector(c / norm)


def make_fock(n: int, dim: int) -> StateVector:
    if not 0 <= n < dim:
        raise ValueError(f"Fock index {n} outside 0..{dim - 1}")
    c = np.zeros(dim, dtype=complex)
    c[n] = 1.0
    return StateVector(c)


def make_on(L: int, phi: float = 0.0, dim: int | None = None) -> StateVector:
    """(|0> + e^{i phi}|L>)/sqrt(2)."""
    if L < 1:
        raise ValueError("ON state needs L >= 1")
    dim = L + 1 if dim is None else dim
    if dim <= L:
        raise ValueError(f"dim={dim} too small for ON state with L={L}")
    c = np.zeros(dim, dtype=complex)
    c[0] = 1.0
    c[L] = np.exp(1j * phi)
    return StateVector(c / math.sqrt(2.0))


def make_cat(n: int, gap: int, dim: int | None = None) -> StateVector:
    """(|n> + |n+gap>)/sqrt(2); gap=2 and gap=4 are the two little cats."""
    if n < 0 or gap < 1:
        raise ValueError("need n >= 0 and gap >= 1")
    dim = n + gap + 1 if dim is None else dim
    if dim <= n + gap:
        raise ValueError(f"dim={dim} too small for |{n}> + |{n + gap}>")
    c = np.zeros(dim, dtype=complex)
    c[n] = c[n + gap] = 1.0 / math.sqrt(2.0)
    return StateVector(c)


def coherent_amplitudes(alpha: float, dim: int) -> np.ndarray:
    """Untruncated Poissonian amplitudes exp(-a^2/2) a^n / sqrt(n!), n < dim."""
    n = np.arange(dim)
    if alpha == 0:
        return (n == 0).astype(float)
    log_c = -0.5 * alpha * alpha + n * math.log(alpha) - 0.5 * gammaln(n + 1)
    return np.exp(log_c)


def make_coherent(alpha: float, tail_tol: float = 1e-14, max_dim: int = 100_000) -> StateVector:
    """Real-amplitude coherent state, truncated where the Poisson tail drops below tail_tol."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    lam = alpha * alpha
    if lam == 0:
        return make_fock(0, 1)
    # P(n >= dim) < tail_tol; start the search near the bulk of the distribution
    dim = max(1, int(lam))
    while poisson.sf(dim - 1, lam) >= tail_tol:
        if dim >= max_dim:
            tail = float(poisson.sf(max_dim - 1, lam))
            raise TruncationError(
                f"coherent state alpha={alpha} needs dim > {max_dim}; "
                f"discarded probability at max_dim would be {tail:.3e}"
            )
        dim = min(max_dim, dim + max(1, int(math.sqrt(lam))))
    while dim > 1 and poisson.sf(dim - 2, lam) < tail_tol:
        dim -= 1
    return make_state(coherent_amplitudes(alpha, dim))


@dataclass(frozen=True)
class Perturbation:
    """Relative frequency shift caused by an adsorbed mass."""

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not 0.0 <= eps < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {eps}")
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def from_mass_ratio(cls, dm_over_m: float) -> "Perturbation":
        return cls(0.5 * dm_over_m)

    @property
    def omega_ratio(self) -> float:
        """omega_tilde / omega."""
        return 1.0 - self.epsilon

    @property
    def y(self) -> float:
        w = self.omega_ratio
        return (1.0 - w) / (1.0 + w)

    @property
    def q(self) -> float:
        w = self.omega_ratio
        return 2.0 * math.sqrt(w) / (1.0 + w)


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be finite and non-negative, got {tau}")
    return tau


def overlap_element(m: int, n: int, perturbation: Perturbation) -> float:
    """<m, omega_tilde | n, omega>, the overlap of perturbed and unperturbed eigenstates."""
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be non-negative")
    if (m + n) % 2:
        return 0.0
    if perturbation.epsilon == 0.0:
        return 1.0 if m == n else 0.0
    return overlap_series(m, n, perturbation.y, perturbation.q)


def overlap_series(m: int, n: int, y: float, q: float) -> float:
    """Finite series for the eigenstate overlap in terms of y and q.

    Swapping the two frequencies flips the sign of y and leaves q alone, so
    ``overlap_series(n, m, -y, q)`` is the overlap in the other direction.
    """
    if (m + n) % 2:
        return 0.0
    log_pre = 0.5 * (-(m + n) * math.log(2.0) + math.log(q) + math.lgamma(m + 1) + math.lgamma(n + 1))
    terms = []
    lo = min(m, n)
    for r in range(lo % 2, lo + 1, 2):
        k = (m + n - 2 * r) // 2
        if k and y == 0.0:
            continue
        sign = -1.0 if ((m - r) // 2) % 2 else 1.0
        if y < 0 and k % 2:
            sign = -sign
        log_t = (
            r * math.log(2.0 * q)
            - math.lgamma(r + 1)
            + (k * math.log(abs(y)) if k else 0.0)
            - math.lgamma((n - r) // 2 + 1)
            - math.lgamma((m - r) // 2 + 1)
        )
        terms.append(sign * math.exp(log_t + log_pre))
    return math.fsum(terms)


@lru_cache(maxsize=64)
def _overlap_matrix_cached(epsilon: float, dim: int) -> np.ndarray:
    if epsilon == 0.0:
        R = np.eye(dim)
        R.setflags(write=False)
        return R
    pert = Perturbation(epsilon)
    y, q = pert.y, pert.q
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    lf = gammaln(np.arange(dim) + 1.0)
    log_pre = 0.5 * (-(m + n) * math.log(2.0) + math.log(q) + lf[m] + lf[n])
    same_parity = (m + n) % 2 == 0
    lo = np.minimum(m, n)
    R = np.zeros((dim, dim))
    for r in range(dim):
        mask = same_parity & (r <= lo) & ((lo - r) % 2 == 0)
        if not mask.any():
            continue
        k = np.where(mask, (m + n - 2 * r) // 2, 0)
        mr = np.where(mask, (m - r) // 2, 0)
        nr = np.where(mask, (n - r) // 2, 0)
        sign = np.where(mr % 2 == 1, -1.0, 1.0)
        if y < 0:
            sign = np.where(k % 2 == 1, -sign, sign)
        log_t = r * math.log(2.0 * q) - lf[r] + k * math.log(abs(y)) - gammaln(nr + 1.0) - gammaln(mr + 1.0)
        R += sign * np.exp(np.where(mask, log_t + log_pre, -np.inf))
    R.setflags(write=False)
    return R


@dataclass(frozen=True)
class OverlapMatrix:
    entries: np.ndarray
    perturbation: Perturbation

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def overlap_matrix(perturbation: Perturbation, dim: int) -> OverlapMatrix:
    """Matrix of ``overlap_element(m, n)`` for m, n < dim (rows: perturbed basis)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return OverlapMatrix(_overlap_matrix_cached(perturbation.epsilon, int(dim)), perturbation)


def working_dim(top_index: int, perturbation: Perturbation, dim: int | None = None) -> int:
    """Fock-space size used when evolving a state supported on 0..top_index."""
    base = top_index + 1 if dim is None else dim
    return top_index + 1 + max(16, 4 * math.ceil(perturbation.epsilon * base))


def free_phases(tau: float, dim: int, omega_ratio: float = 1.0) -> np.ndarray:
    """exp(-i E_k t) with E_k = omega_ratio * (k + 1/2)."""
    return np.exp(-1j * omega_ratio * (np.arange(dim) + 0.5) * tau)


def perturbed_propagator(tau: float, perturbation: Perturbation, dim: int) -> np.ndarray:
    """exp(-i H_tilde t) written in the unperturbed basis, truncated to ``dim``."""
    tau = _check_tau(tau)
    R = overlap_matrix(perturbation, dim).entries
    phases = free_phases(tau, dim, perturbation.omega_ratio)
    return R.T @ (phases[:, None] * R)


def evolve_free(state, tau: float) -> StateVector:
    """Evolution under the unperturbed Hamiltonian."""
    c = as_coeffs(state)
    return StateVector(free_phases(_check_tau(tau), c.size) * c)


def evolve_in_perturbed_frame(
    state,
    tau: float,
    perturbation: Perturbation,
    dim: int | None = None,
    norm_tol: float = NORM_TOL,
) -> StateVector:
    """Amplitudes in the unperturbed basis of exp(-i H_tilde t)|psi>.

    The result lives on a padded space (see ``working_dim``) and is not
    renormalized; a norm deficit above ``norm_tol`` raises ``TruncationError``.
    """
    tau = _check_tau(tau)
    st = state if isinstance(state, StateVector) else StateVector(state)
    dim = working_dim(st.top_index, perturbation) if dim is None else dim
    c = st.padded(dim)
    if perturbation.epsilon == 0.0:
        return StateVector(free_phases(tau, dim) * c)
    R = overlap_matrix(perturbation, dim).entries
    phases = free_phases(tau, dim, perturbation.omega_ratio)
    out = R.T @ (phases * (R @ c))
    deficit = abs(float(np.vdot(out, out).real) - 1.0)
    if deficit > norm_tol:
        raise TruncationError(
            f"norm deficit {deficit:.2e} after perturbed evolution in dim={dim}; increase dim"
        )
    return StateVector(out)
