"""Conversion of the dimensionless bound to grams for concrete resonators."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pure import f_coherent, min_mass_ratio

HBAR = 1.054571817e-34  # J s
ELECTRON_MASS_G = 9.1093837015e-28


@dataclass(frozen=True)
class PhysicalSpec:
    """A resonator driven into a coherent state.

    Give exactly one of ``mean_quanta`` and ``amplitude_m`` (the position
    amplitude of the oscillation, in metres).
    """

    mass_g: float
    omega_rad_s: float
    time_s: float
    mean_quanta: float | None = None
    amplitude_m: float | None = None
    n_measurements: int = 1

    def __post_init__(self):
        for name in ("mass_g", "omega_rad_s", "time_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_measurements < 1:
            raise ValueError("n_measurements must be positive")
        if (self.mean_quanta is None) == (self.amplitude_m is None):
            raise ValueError("give exactly one of mean_quanta and amplitude_m")
        given = self.mean_quanta if self.mean_quanta is not None else self.amplitude_m
        if not given > 0:
            raise ValueError("excitation must be positive")

    @property
    def tau(self) -> float:
        return self.omega_rad_s * self.time_s

    @property
    def oscillator_length_m(self) -> float:
        return math.sqrt(HBAR / (self.mass_g * 1e-3 * self.omega_rad_s))

    @property
    def alpha(self) -> float:
        if self.mean_quanta is not None:
            return math.sqrt(self.mean_quanta)
        return self.amplitude_m / (math.sqrt(2.0) * self.oscillator_length_m)


@dataclass(frozen=True)
class PhysicalResult:
    tau: float
    alpha: float
    mean_quanta: float
    delta_m_over_m: float
    delta_m_g: float
    delta_m_electron_masses: float


def physical_min_mass(spec: PhysicalSpec) -> PhysicalResult:
    alpha = spec.alpha
    res = min_mass_ratio(f_coherent(alpha, spec.tau), spec.n_measurements, spec.tau)
    dm = res.delta_m_over_m * spec.mass_g
    return PhysicalResult(spec.tau, alpha, alpha * alpha, res.delta_m_over_m, dm, dm / ELECTRON_MASS_G)
