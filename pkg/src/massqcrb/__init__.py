"""Quantum-limited mass sensing with a nano-mechanical harmonic oscillator."""

from .mixed import (
    ConvergenceError,
    DensityMatrix,
    ThermalSpec,
    bures_derivative,
    bures_distance,
    fidelity,
    observable_cramer_rao,
    thermal_convexity_bound,
    thermal_min_mass,
    thermal_state,
    x2_measurement_bound,
)
from .optimize import OptimizationReport, optimize_state, variance_certificate
from .oscillator import (
    Perturbation,
    StateVector,
    TruncationError,
    evolve_in_perturbed_frame,
    make_cat,
    make_coherent,
    make_fock,
    make_on,
    make_state,
    overlap_element,
    overlap_matrix,
)
from .pure import (
    SensitivityResult,
    f_cat_s1,
    f_cat_s2,
    f_coherent,
    f_fock,
    f_on_asymptotic,
    fidelity_finite_eps,
    fisher_f,
    min_mass_ratio,
    pure_min_mass,
)
from .wigner import PhaseSpaceGrid, eigenfunction, wigner_grid

__version__ = "0.1.0"
