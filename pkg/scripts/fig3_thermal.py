"""Thermal states: M/dM_min against tau for several z, plus the z sweep at fixed tau."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from _common import parse_config, write_csv
from massqcrb.cli import sweep_fig3, sweep_fig3_inset


@dataclass
class Config:
    z: tuple = (0.2, 0.5, 1.0, 2.0, 5.0, 10.0)
    tau_max: float = 2 * math.pi
    steps: int = 400
    inset_tau: float = math.pi / 2
    inset_z_min: float = 0.2
    inset_z_max: float = 10.0
    inset_steps: int = 50
    n_measurements: int = 1
    out: str = "results/fig3_thermal.csv"
    inset_out: str = "results/fig3_thermal_inset.csv"


def main(cfg: Config) -> None:
    taus = np.linspace(0.0, cfg.tau_max, cfg.steps)
    table = sweep_fig3(cfg.z, taus, cfg.n_measurements)
    write_csv(cfg.out, table["columns"], table["rows"])
    zs = np.geomspace(cfg.inset_z_min, cfg.inset_z_max, cfg.inset_steps)
    inset = sweep_fig3_inset(zs, cfg.inset_tau, cfg.n_measurements)
    write_csv(cfg.inset_out, inset["columns"], inset["rows"])


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
