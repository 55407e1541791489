"""Exact thermal dM_min/M next to its convexity lower bounds and the x^2 measurement upper bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from _common import parse_config, write_csv
from massqcrb.mixed import (
    ThermalSpec,
    bures_derivative,
    observable_cramer_rao,
    thermal_convexity_bound,
    thermal_state,
    x2_dynamic_statistics,
    x2_measurement_bound,
)


@dataclass
class Config:
    z: tuple = (0.2, 0.5, 1.0, 2.0, 5.0, 10.0)
    tau_min: float = 0.15
    tau_max: float = math.pi - 0.15
    steps: int = 25
    out: str = "results/thermal_bounds.csv"


def main(cfg: Config) -> None:
    rows = []
    for z in cfg.z:
        spec = ThermalSpec(z)
        rho = thermal_state(spec)
        static = x2_measurement_bound(spec)
        for tau in np.linspace(cfg.tau_min, cfg.tau_max, cfg.steps):
            tau = float(tau)
            exact = 1 / bures_derivative(rho, tau).value
            b = thermal_convexity_bound(spec, tau)
            dynamic = observable_cramer_rao(*x2_dynamic_statistics(rho, tau))
            rows.append([z, tau, exact, 1 / b.envelope, 1 / b.root_series, 1 / b.series, dynamic, static])
    columns = [
        "z",
        "tau",
        "exact",
        "convexity_envelope",
        "convexity_root_series",
        "convexity_linear_series",
        "x2_dynamic",
        "x2_static_formula",
    ]
    write_csv(cfg.out, columns, rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
