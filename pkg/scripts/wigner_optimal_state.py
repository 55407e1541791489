"""Wigner function of the optimal state with at most L quanta, written as a grid CSV."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from _common import parse_config
from massqcrb.cli import format_wigner_csv
from massqcrb.optimize import canonical_phase, optimize_state
from massqcrb.wigner import wigner_grid


@dataclass
class Config:
    L: int = 4
    tau: float = math.pi / 2
    restarts: int = 64
    seed: int = 7
    half_width: float = 6.0
    resolution: int = 256
    out: str = "results/wigner_optimal_L4.csv"


def main(cfg: Config) -> None:
    rep = optimize_state(cfg.L, cfg.tau, restarts=cfg.restarts, seed=cfg.seed)
    coeffs = canonical_phase(rep.best_state.coeffs)
    print(f"|f| = {abs(rep.best_f):.8f}")
    for n, c in enumerate(coeffs):
        print(f"  c_{n} = {c.real:+.5f} {c.imag:+.5f}i")
    grid = wigner_grid(rep.best_state, (-cfg.half_width, cfg.half_width), resolution=cfg.resolution)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_wigner_csv(grid))
    print(f"wrote {out} (normalization {grid.normalization:.6f})")


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
