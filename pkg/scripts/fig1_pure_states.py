"""M/dM_min against tau for a Fock state, the ON state, the optimum and a coherent state."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from _common import parse_config, write_csv
from massqcrb.cli import sweep_fig1


@dataclass
class Config:
    L: int = 3
    tau_max: float = 2 * math.pi
    steps: int = 101
    restarts: int = 16
    seed: int = 0
    out: str = "results/fig1_pure_states.csv"


def main(cfg: Config) -> None:
    table = sweep_fig1(cfg.L, np.linspace(0.0, cfg.tau_max, cfg.steps), cfg.restarts, cfg.seed)
    write_csv(cfg.out, table["columns"], table["rows"])
    at = int(np.argmin(np.abs(np.array([r[0] for r in table["rows"]]) - math.pi / 2)))
    row = dict(zip(table["columns"], table["rows"][at]))
    print("at tau ~ pi/2: " + ", ".join(f"{k}={v:.4f}" for k, v in row.items()))


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
