"""Smallest detectable mass for two example resonators driven into coherent states."""

from __future__ import annotations

import math
from dataclasses import dataclass

from _common import parse_config, write_csv
from massqcrb.physical import PhysicalSpec, physical_min_mass


@dataclass
class Config:
    out: str = "results/physical_estimates.csv"


DEVICES = {
    "micromachined": PhysicalSpec(mass_g=1e-16, omega_rad_s=1e9, time_s=1e-3, mean_quanta=1e10),
    "nanotube": PhysicalSpec(mass_g=1e-18, omega_rad_s=2 * math.pi * 328.5e6, time_s=0.1, amplitude_m=1e-8),
}


def main(cfg: Config) -> None:
    rows = []
    for name, spec in DEVICES.items():
        r = physical_min_mass(spec)
        rows.append([name, r.tau, r.mean_quanta, r.delta_m_over_m, r.delta_m_g, r.delta_m_electron_masses])
        print(f"{name}: dM = {r.delta_m_g:.3e} g = {r.delta_m_electron_masses:.3e} electron masses")
    columns = ["device", "tau", "mean_quanta", "delta_m_over_m", "delta_m_g", "delta_m_electron_masses"]
    write_csv(cfg.out, columns, rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
