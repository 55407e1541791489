"""Shared helpers: dataclass configs from the command line and CSV output."""

from __future__ import annotations

import argparse
import csv
import dataclasses
from pathlib import Path


def parse_config(cls, description: str):
    """Build an instance of the dataclass ``cls``; every field becomes a ``--flag``."""
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if isinstance(f.default, tuple):
            kind = type(f.default[0]) if f.default else float
            parser.add_argument(flag, type=kind, nargs="+", default=f.default)
        else:
            parser.add_argument(flag, type=type(f.default), default=f.default)
    ns = parser.parse_args()
    return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in vars(ns).items()})


def write_csv(path: str | Path, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        w.writerows([f"{v:.10g}" if isinstance(v, float) else v for v in row] for row in rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return path
