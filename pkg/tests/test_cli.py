import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from massqcrb import cli
from massqcrb.oscillator import StateVector, make_on
from massqcrb.physical import ELECTRON_MASS_G, PhysicalSpec, physical_min_mass
from massqcrb.schemas import BY_COMMAND

HALF_PI = math.pi / 2
NANOTUBE = ["--mass-g", "1e-18", "--omega", str(2 * math.pi * 328.5e6), "--time", "0.1", "--amplitude", "1e-8"]
MICRO = ["--mass-g", "1e-16", "--omega", "1e9", "--time", "1e-3", "--mean-quanta", "1e10"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, BY_COMMAND[argv[0]])
    return doc


# -- state mini-language -------------------------------------------------------


def test_parse_state_examples():
    np.testing.assert_array_equal(cli.parse_state("fock:3").coeffs, [0, 0, 0, 1])
    np.testing.assert_allclose(cli.parse_state("on:3").coeffs, make_on(3).coeffs)
    np.testing.assert_allclose(cli.parse_state("on:2:3.14159265358979").coeffs[2], -(2**-0.5), atol=1e-12)
    assert cli.parse_state("coherent:1.2247").mean_number() == pytest.approx(1.5, abs=2e-4)
    np.testing.assert_allclose(cli.parse_state("cat1:1").coeffs, [0, 2**-0.5, 0, 2**-0.5])
    np.testing.assert_allclose(cli.parse_state("cat2:0").coeffs, [2**-0.5, 0, 0, 0, 2**-0.5])


@pytest.mark.parametrize("bad", ["fock", "fock:x", "squeezed:1", "on:2:1:1", "cat1:-1"])
def test_parse_state_rejects_malformed(bad):
    with pytest.raises(cli.UsageError):
        cli.parse_state(bad)


def test_malformed_state_exit_code_names_token(capsys):
    code, out, err = run(capsys, "min-mass", "squeezed:1")
    assert code == 1 and out == "" and "squeezed" in err


def test_missing_custom_file_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "min-mass", f"custom:{tmp_path / 'missing.json'}")
    assert code == 1 and "missing.json" in err


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=9))
def test_custom_state_round_trip_is_bit_exact(tmp_path_factory, pairs):
    c = np.array([complex(a, b) for a, b in pairs])
    if np.linalg.norm(c) < 1e-3:
        return
    state = StateVector(c / np.linalg.norm(c))
    path = tmp_path_factory.mktemp("state") / "s.json"
    cli.write_custom_state(state, str(path))
    back = cli.parse_state(f"custom:{path}")
    assert np.array_equal(back.coeffs, state.coeffs)


def test_custom_state_accepts_bare_array_and_normalizes(tmp_path):
    path = tmp_path / "s.json"
    path.write_text("[[3, 0], [0, 4]]")
    np.testing.assert_allclose(cli.parse_state(f"custom:{path}").coeffs, [0.6, 0.8j])


# -- min-mass -------------------------------------------------------------------


def test_min_mass_examples(capsys):
    doc = run_json(capsys, "min-mass", "fock:3", "--tau", str(HALF_PI))
    assert doc["delta_m_over_m"] == pytest.approx(math.sqrt(2 / 13), abs=1e-12)
    doc = run_json(capsys, "min-mass", "fock:0", "-N", "2")
    assert doc["delta_m_over_m"] == pytest.approx(1.0, abs=1e-12)
    doc = run_json(capsys, "min-mass", "on:3", "--tau", "0")
    assert doc["delta_m_over_m"] == "inf"


def test_min_mass_text_and_csv(capsys):
    code, out, _ = run(capsys, "min-mass", "fock:3")
    assert code == 0 and "delta_m_over_m: 3.92232270276e-01" in out
    code, out, _ = run(capsys, "min-mass", "fock:3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["state", "tau", "f", "delta_m_over_m", "n_measurements"]
    assert rows[1][3] == "3.92232270276e-01"


def test_out_file_is_written(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "min-mass", "fock:1", "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    jsonschema.validate(json.loads(path.read_text()), BY_COMMAND["min-mass"])
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]


def test_unwritable_out_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "min-mass", "fock:1", "--out", str(tmp_path / "no" / "such" / "r.txt"))
    assert code == 1 and err


def test_numerical_failure_exit_code(capsys):
    code, out, err = run(capsys, "min-mass", "coherent:400")
    assert code == 2 and out == "" and "numerical failure" in err


def test_argparse_errors_exit_one(capsys):
    assert run(capsys, "min-mass", "fock:1", "--tau", "abc")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "min-mass", "fock:1", "--tau", "-1")[0] == 1


# -- config ---------------------------------------------------------------------


def test_config_sets_defaults_and_flags_win(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tau": 0.0, "n_measurements": 4}))
    doc = run_json(capsys, "min-mass", "fock:0", "--config", str(cfg))
    assert doc["delta_m_over_m"] == "inf" and doc["n_measurements"] == 4
    doc = run_json(capsys, "min-mass", "fock:0", "--config", str(cfg), "--tau", str(HALF_PI))
    assert doc["delta_m_over_m"] == pytest.approx(1 / math.sqrt(2))


def test_config_unknown_key_rejected(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"temperature": 3}))
    code, _, err = run(capsys, "min-mass", "fock:0", "--config", str(cfg))
    assert code == 1 and "temperature" in err


def test_config_unreadable(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert run(capsys, "min-mass", "fock:0", "--config", str(cfg))[0] == 1


# -- sweeps -----------------------------------------------------------------------


def test_sweep_fig1(capsys):
    doc = run_json(capsys, "sweep-fig1", "--tau-max", str(math.pi), "--steps", "3", "--restarts", "8")
    assert doc["columns"] == ["tau", "fock_3", "on_3", "on_3_asymptote", "optimal_L3", "coherent_mean_L_half"]
    rows = {round(r[0], 6): r for r in doc["rows"]}
    half, full = rows[round(HALF_PI, 6)], rows[round(math.pi, 6)]
    assert full[4] == pytest.approx(full[2], rel=1e-8)
    assert full[3] == pytest.approx(3 * math.pi / 2)
    assert half[4] / half[2] == pytest.approx(1.04, abs=0.015)
    assert half[4] / half[1] == pytest.approx(1.22, abs=0.015)
    assert doc["rows"][0][1:] == [0.0] * 5


def test_sweep_fig1_csv_header(capsys):
    code, out, _ = run(capsys, "sweep-fig1", "--steps", "2", "--restarts", "2", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "tau,fock_3,on_3,on_3_asymptote,optimal_L3,coherent_mean_L_half"
    assert all(len(v.split("e")[0].replace("-", "").replace(".", "")) == 12 for v in lines[2].split(","))


def test_thermal_sweep(capsys):
    doc = run_json(capsys, "thermal", "--z", "0.2,10", "--tau-max", str(math.pi), "--steps", "5")
    assert doc["columns"] == ["tau", "z=0.2", "z=10"]
    rows = doc["rows"]
    assert rows[2][2] == pytest.approx(0.7071, rel=1e-2)
    assert rows[-1][1:] == [0.0, 0.0]
    for row in rows[1:-1]:
        assert row[1] >= row[2]


def test_thermal_inset(capsys):
    doc = run_json(capsys, "thermal", "--inset", "--z-min", "0.5", "--z-max", "10", "--z-steps", "4")
    assert doc["columns"] == ["z", "inverse_min_mass"]
    inv = [r[1] for r in doc["rows"]]
    assert all(a >= b for a, b in zip(inv, inv[1:]))


def test_steps_must_be_at_least_two(capsys):
    assert run(capsys, "thermal", "--steps", "1")[0] == 1


# -- optimize ------------------------------------------------------------------


def test_optimize_report_and_saved_state(capsys, tmp_path):
    path = tmp_path / "opt.json"
    doc = run_json(capsys, "optimize", "--L", "4", "--restarts", "64", "--seed", "7", "--save-state", str(path))
    assert doc["abs_f"] == pytest.approx(17.1927, rel=1e-3)
    assert doc["coeffs"][0][1] == 0.0 and doc["coeffs"][0][0] > 0
    again = run_json(capsys, "min-mass", f"custom:{path}")
    assert -again["f"] == pytest.approx(doc["abs_f"], rel=1e-12)


def test_optimize_l0(capsys):
    doc = run_json(capsys, "optimize", "--L", "0", "--tau", "1.0")
    assert doc["abs_f"] == pytest.approx(math.sin(1.0) ** 2 / 2)


def test_optimize_is_bitwise_reproducible(capsys):
    first = run(capsys, "optimize", "--L", "3", "--seed", "5", "--restarts", "6", "--format", "json")[1]
    second = run(capsys, "optimize", "--L", "3", "--seed", "5", "--restarts", "6", "--format", "json")[1]
    assert first == second


# -- wigner -------------------------------------------------------------------


def test_wigner_file_format(capsys, tmp_path):
    path = tmp_path / "w.csv"
    doc = run_json(capsys, "wigner", "fock:1", "--resolution", "129", "--out", str(path))
    assert doc["normalization"] == pytest.approx(1.0, abs=1e-4)
    lines = path.read_text().splitlines()
    assert lines[0] == "# x0_units"
    assert lines[1].startswith("x: ") and lines[2].startswith("p: ")
    assert len(lines) == 3 + 129
    assert all(len(line.split(",")) == 129 for line in lines[3:])
    xs, ps, values = cli.read_wigner_csv(str(path))
    assert values[64, 64] == pytest.approx(-1 / math.pi, abs=1e-10)
    assert xs[64] == 0.0 and ps[64] == 0.0


def test_wigner_ground_peak(capsys, tmp_path):
    path = tmp_path / "w.csv"
    assert run(capsys, "wigner", "fock:0", "--resolution", "65", "--out", str(path))[0] == 0
    _, _, values = cli.read_wigner_csv(str(path))
    assert values.max() == pytest.approx(1 / math.pi, abs=1e-10)


def test_wigner_requires_out(capsys):
    assert run(capsys, "wigner", "fock:0")[0] == 1


def test_wigner_unwritable_path(capsys, tmp_path):
    assert run(capsys, "wigner", "fock:0", "--resolution", "64", "--out", str(tmp_path / "x" / "w.csv"))[0] == 1


# -- physical -------------------------------------------------------------------


def test_physical_micromachined(capsys):
    doc = run_json(capsys, "physical", *MICRO)
    assert doc["tau"] == pytest.approx(1e6)
    assert 0.5e-27 <= doc["delta_m_g"] <= 2e-27
    heavier = run_json(capsys, "physical", *(MICRO[:1] + ["1e-14"] + MICRO[2:]))
    assert heavier["delta_m_g"] == pytest.approx(100 * doc["delta_m_g"], rel=1e-9)


def test_physical_nanotube(capsys):
    doc = run_json(capsys, "physical", *NANOTUBE)
    assert 1e-4 <= doc["delta_m_electron_masses"] <= 1e-2


def test_physical_spec_derived_quantities():
    spec = PhysicalSpec(1e-18, 2 * math.pi * 328.5e6, 0.1, amplitude_m=1e-8)
    x0 = math.sqrt(1.054571817e-34 / (1e-21 * spec.omega_rad_s))
    assert spec.oscillator_length_m == pytest.approx(x0)
    assert spec.alpha == pytest.approx(1e-8 / (math.sqrt(2) * x0))
    r = physical_min_mass(spec)
    assert r.delta_m_electron_masses == pytest.approx(r.delta_m_g / ELECTRON_MASS_G)


@pytest.mark.parametrize(
    "argv",
    [
        ["--mass-g", "1e-16", "--omega", "1e9", "--time", "1e-3"],
        MICRO + ["--amplitude", "1e-8"],
        ["--mass-g", "-1", "--omega", "1e9", "--time", "1e-3", "--mean-quanta", "1"],
    ],
)
def test_physical_invalid_spec(capsys, argv):
    code, out, err = run(capsys, "physical", *argv)
    assert code == 1 and out == "" and err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "massqcrb", "min-mass", "fock:3", "--format", "json"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["f"] == -6.5
