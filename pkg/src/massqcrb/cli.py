"""Command-line front end: ``massqcrb <command> [flags]``.

Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from .mixed import ConvergenceError, ThermalSpec, bures_derivative, thermal_state
from .optimize import optimize_state
from .oscillator import StateVector, TruncationError, make_cat, make_coherent, make_fock, make_on, make_state
from .physical import PhysicalSpec, physical_min_mass
from .pure import f_coherent, f_on_asymptotic, fisher_f, min_mass_ratio
from .wigner import wigner_grid

log = logging.getLogger("massqcrb")

EXIT_USAGE = 1
EXIT_NUMERICAL = 2
FIG3_Z = (0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


class UsageError(ValueError):
    pass


# -- state mini-language -----------------------------------------------------


def parse_state(spec: str) -> StateVector:
    """Build a state from ``fock:n``, ``on:L[:phi]``, ``cat1:n``, ``cat2:n``, ``coherent:a`` or ``custom:path``."""
    kind, _, rest = spec.partition(":")
    if not rest:
        raise UsageError(f"malformed state spec {spec!r}: expected <kind>:<args>")
    if kind == "custom":
        return read_custom_state(rest)
    parts = rest.split(":")
    try:
        if kind == "fock" and len(parts) == 1:
            n = int(parts[0])
            return make_fock(n, n + 1)
        if kind == "on" and len(parts) in (1, 2):
            phi = float(parts[1]) if len(parts) == 2 else 0.0
            return make_on(int(parts[0]), phi)
        if kind == "cat1" and len(parts) == 1:
            return make_cat(int(parts[0]), 2)
        if kind == "cat2" and len(parts) == 1:
            return make_cat(int(parts[0]), 4)
        if kind == "coherent" and len(parts) == 1:
            return make_coherent(float(parts[0]))
    except ValueError as exc:
        raise UsageError(f"bad state spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown state spec {spec!r} (offending token {kind!r})")


def read_custom_state(path: str) -> StateVector:
    with open(path) as fh:
        doc = json.load(fh)
    pairs = doc["coeffs"] if isinstance(doc, dict) and "coeffs" in doc else doc
    try:
        c = np.array([complex(re, im) for re, im in pairs])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: expected {{'coeffs': [[re, im], ...]}} ({exc})") from None
    if c.size == 0:
        raise UsageError(f"{path}: no coefficients")
    norm = float(np.vdot(c, c).real)
    # already-normalized input is kept bit for bit
    return StateVector(c) if abs(norm - 1.0) <= 1e-12 else make_state(c)


def custom_state_doc(state) -> dict:
    c = state.coeffs if isinstance(state, StateVector) else np.asarray(state, complex)
    # json writes floats with repr, which round-trips exactly
    return {"coeffs": [[float(z.real), float(z.imag)] for z in c]}


def write_custom_state(state, path: str) -> None:
    _atomic_write(path, json.dumps(custom_state_doc(state)) + "\n")


# -- output helpers ------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.11e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.floating):
        return _jsonable(float(v))
    return v


def render(payload, fmt: str) -> str:
    """payload is either a flat dict or a table {"columns": [...], "rows": [[...]]}."""
    if fmt == "json":
        return json.dumps(_jsonable(payload), indent=2) + "\n"
    buf = io.StringIO()
    if "columns" in payload:
        if fmt == "csv":
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(payload["columns"])
            w.writerows([[_fmt(v) for v in row] for row in payload["rows"]])
        else:
            buf.write("  ".join(f"{c:>18}" for c in payload["columns"]) + "\n")
            for row in payload["rows"]:
                buf.write("  ".join(f"{_fmt(v):>18}" for v in row) + "\n")
        return buf.getvalue()
    flat = {k: (json.dumps(v) if isinstance(v, list) else v) for k, v in payload.items()}
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(flat))
        w.writerow([_fmt(v) for v in flat.values()])
    else:
        for k, v in flat.items():
            buf.write(f"{k}: {_fmt(v)}\n")
    return buf.getvalue()


def emit(payload, args) -> None:
    text = render(payload, args.format)
    # for wigner, --out names the grid file and the summary goes to stdout
    if args.out and args.command != "wigner":
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _inverse(f: float) -> float:
    """M/dM_min for N = 1."""
    return min_mass_ratio(f, 1).inverse


def _grid(tau_max: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise UsageError("steps must be >= 2")
    return np.linspace(0.0, tau_max, steps)


# -- commands -----------------------------------------------------------------


def cmd_min_mass(args) -> dict:
    if args.state is None:
        raise UsageError("min-mass needs a state spec")
    state = parse_state(args.state)
    res = min_mass_ratio(fisher_f(state, args.tau), args.n_measurements, args.tau)
    return {
        "state": args.state,
        "tau": res.tau,
        "f": res.f_value,
        "delta_m_over_m": res.delta_m_over_m,
        "n_measurements": res.n_measurements,
    }


def sweep_fig1(L: int, taus, restarts: int = 16, seed: int = 0) -> dict:
    """M/dM_min (N = 1) against tau for |L>, the ON state, its asymptote, the optimum and a coherent state."""
    fock = make_fock(L, L + 1)
    on = make_on(L)
    alpha = math.sqrt(L / 2.0)
    rows = []
    prev = None
    for tau in taus:
        tau = float(tau)
        log.info("sweep-fig1 tau=%.6g", tau)
        rep = optimize_state(L, tau, restarts=restarts, seed=seed, extra_starts=[prev] if prev is not None else None)
        prev = rep.best_state.coeffs
        rows.append(
            [
                tau,
                _inverse(fisher_f(fock, tau)),
                _inverse(fisher_f(on, tau)),
                _inverse(f_on_asymptotic(L, tau)),
                _inverse(rep.best_f),
                _inverse(f_coherent(alpha, tau)),
            ]
        )
    columns = ["tau", f"fock_{L}", f"on_{L}", f"on_{L}_asymptote", f"optimal_L{L}", "coherent_mean_L_half"]
    return {"columns": columns, "rows": rows}


def cmd_sweep_fig1(args) -> dict:
    return sweep_fig1(args.L, _grid(args.tau_max, args.steps), args.restarts, args.seed)


def thermal_inverse_mass(z: float, tau: float, n_measurements: int = 1) -> float:
    d = bures_derivative(thermal_state(ThermalSpec(z)), tau).value
    return math.sqrt(n_measurements) * d


def sweep_fig3(z_values, taus, n_measurements: int = 1) -> dict:
    states = {z: thermal_state(ThermalSpec(z)) for z in z_values}
    rows = []
    for tau in taus:
        log.info("thermal tau=%.6g", tau)
        row = [float(tau)]
        for z in z_values:
            row.append(math.sqrt(n_measurements) * bures_derivative(states[z], float(tau)).value)
        rows.append(row)
    return {"columns": ["tau"] + [f"z={z:g}" for z in z_values], "rows": rows}


def sweep_fig3_inset(z_values, tau: float = math.pi / 2, n_measurements: int = 1) -> dict:
    rows = [[float(z), thermal_inverse_mass(float(z), tau, n_measurements)] for z in z_values]
    return {"columns": ["z", "inverse_min_mass"], "rows": rows}


def cmd_thermal(args) -> dict:
    if args.inset:
        zs = np.geomspace(args.z_min, args.z_max, args.z_steps)
        return sweep_fig3_inset(zs, args.tau, args.n_measurements)
    return sweep_fig3(args.z, _grid(args.tau_max, args.steps), args.n_measurements)


def cmd_optimize(args) -> dict:
    rep = optimize_state(args.L, args.tau, restarts=args.restarts, seed=args.seed)
    res = min_mass_ratio(rep.best_f, 1, rep.tau)
    if args.save_state:
        write_custom_state(rep.best_state, args.save_state)
    return {
        "L": rep.L,
        "tau": rep.tau,
        "coeffs": [[float(z.real), float(z.imag)] for z in rep.best_state.coeffs],
        "abs_f": abs(rep.best_f),
        "delta_m_over_m": res.delta_m_over_m,
        "restarts_used": rep.restarts_used,
        "converged": rep.converged,
        "spread": rep.spread,
        "seed": args.seed,
    }


def format_wigner_csv(grid) -> str:
    lines = ["# x0_units"]
    lines.append("x: " + ",".join(f"{v:.11e}" for v in grid.x_values))
    lines.append("p: " + ",".join(f"{v:.11e}" for v in grid.p_values))
    for row in grid.values:
        lines.append(",".join(f"{v:.11e}" for v in row))
    return "\n".join(lines) + "\n"


def read_wigner_csv(path: str):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "# x0_units":
        raise UsageError(f"{path}: not a Wigner grid file")
    xs = np.array([float(v) for v in lines[1].removeprefix("x: ").split(",")])
    ps = np.array([float(v) for v in lines[2].removeprefix("p: ").split(",")])
    values = np.array([[float(v) for v in line.split(",")] for line in lines[3:]])
    return xs, ps, values


def cmd_wigner(args) -> dict:
    if args.state is None:
        raise UsageError("wigner needs a state spec")
    if not args.out:
        raise UsageError("wigner needs --out for the grid file")
    state = parse_state(args.state)
    grid = wigner_grid(state, (-args.range, args.range), resolution=args.resolution)
    _atomic_write(args.out, format_wigner_csv(grid))
    return {
        "out": args.out,
        "resolution": args.resolution,
        "normalization": grid.normalization,
        "imag_residue": grid.imag_residue,
    }


def cmd_physical(args) -> dict:
    try:
        spec = PhysicalSpec(
            mass_g=args.mass_g,
            omega_rad_s=args.omega,
            time_s=args.time,
            mean_quanta=args.mean_quanta,
            amplitude_m=args.amplitude,
            n_measurements=args.n_measurements,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    r = physical_min_mass(spec)
    return {
        "tau": r.tau,
        "alpha": r.alpha,
        "mean_quanta": r.mean_quanta,
        "delta_m_over_m": r.delta_m_over_m,
        "delta_m_g": r.delta_m_g,
        "delta_m_electron_masses": r.delta_m_electron_masses,
    }


COMMANDS = {
    "min-mass": cmd_min_mass,
    "sweep-fig1": cmd_sweep_fig1,
    "thermal": cmd_thermal,
    "optimize": cmd_optimize,
    "wigner": cmd_wigner,
    "physical": cmd_physical,
}


# -- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _z_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--config", help="JSON file of flag values; command-line flags take precedence")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="massqcrb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("min-mass", parents=[common], help="dM_min/M of a pure state")
    p.add_argument("state", nargs="?")
    p.add_argument("--tau", type=float, default=math.pi / 2)
    p.add_argument("-N", "--n-measurements", type=int, default=1)
    subs["min-mass"] = p

    p = sub.add_parser("sweep-fig1", parents=[common], help="M/dM_min against tau for selected pure states")
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--tau-max", type=float, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    subs["sweep-fig1"] = p

    p = sub.add_parser("thermal", parents=[common], help="M/dM_min of thermal states")
    p.add_argument("--z", type=_z_list, default=list(FIG3_Z))
    p.add_argument("--tau-max", type=float, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("-N", "--n-measurements", type=int, default=1)
    p.add_argument("--inset", action="store_true", help="sweep z at fixed --tau instead")
    p.add_argument("--tau", type=float, default=math.pi / 2)
    p.add_argument("--z-min", type=float, default=0.2)
    p.add_argument("--z-max", type=float, default=10.0)
    p.add_argument("--z-steps", type=int, default=50)
    subs["thermal"] = p

    p = sub.add_parser("optimize", parents=[common], help="best state with at most L quanta")
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--tau", type=float, default=math.pi / 2)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-state", help="write the optimum as a custom-state JSON file")
    subs["optimize"] = p

    p = sub.add_parser("wigner", parents=[common], help="Wigner function grid as CSV")
    p.add_argument("state", nargs="?")
    p.add_argument("--range", type=float, default=8.0, help="half-width of the square grid")
    p.add_argument("--resolution", type=int, default=256)
    subs["wigner"] = p

    p = sub.add_parser("physical", parents=[common], help="dM_min in grams for a coherently driven resonator")
    p.add_argument("--mass-g", type=float, required=False)
    p.add_argument("--omega", type=float, help="angular frequency in rad/s")
    p.add_argument("--time", type=float, help="measurement time in s")
    p.add_argument("--mean-quanta", type=float)
    p.add_argument("--amplitude", type=float, help="oscillation amplitude in m")
    p.add_argument("-N", "--n-measurements", type=int, default=1)
    subs["physical"] = p
    return parser, subs


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            parser.exit(EXIT_USAGE, f"massqcrb: cannot read config {args.config}: {exc}\n")
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = sorted(set(cfg) - known)
        if unknown:
            parser.exit(EXIT_USAGE, f"massqcrb: unknown config keys {unknown}\n")
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        payload = COMMANDS[args.command](args)
        emit(payload, args)
    except (TruncationError, ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"massqcrb: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"massqcrb: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
