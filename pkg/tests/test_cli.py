import csv
import json

import pytest
from click.testing import CliRunner

from subcubes.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_phase_example(runner, tmp_path):
    out = tmp_path / "phase.csv"
    res = runner.invoke(main, ["--out", str(out), "phase",
                               "--p", "0.95", "--alpha", "0.5"])
    assert res.exit_code == 0
    assert "phase=clustered" in res.output
    rows = _rows(out)
    assert rows[0] == ["alpha", "p", "phase", "s_tot", "s_star",
                       "sigma_star", "m"]
    assert rows[1][2] == "clustered"
    assert float(rows[1][0]) == 0.5


def test_unknown_flag_exits_2(runner):
    res = runner.invoke(main, ["phase", "--bogus", "1"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["nope"])
    assert res.exit_code == 2


def test_runtime_error_exits_1(runner, tmp_path):
    res = runner.invoke(main, ["--out", str(tmp_path / "x.csv"),
                               "phase", "--p", "0.5", "--alpha", "-1"])
    assert res.exit_code == 1


def test_instance_gen_unsat_warns(runner, tmp_path):
    out = tmp_path / "inst.json"
    res = runner.invoke(main, ["--seed", "1", "--out", str(out),
                               "instance", "gen", "--n", "10",
                               "--alpha", "1.2", "--p", "0.5"])
    assert res.exit_code == 0
    assert "unsat regime" in res.output
    doc = json.loads(out.read_text())
    assert doc["clusters"] == [] and doc["n"] == 10


def test_instance_pipeline(runner, tmp_path):
    inst = tmp_path / "inst.json"
    res = runner.invoke(main, ["--seed", "3", "--out", str(inst),
                               "instance", "gen", "--n", "12",
                               "--alpha", "0.75", "--p", "0.7"])
    assert res.exit_code == 0

    out = tmp_path / "count.csv"
    res = runner.invoke(main, ["--out", str(out), "instance", "count",
                               "--instance", str(inst)])
    assert res.exit_code == 0
    rows = _rows(out)
    assert rows[0] == ["method", "count"]
    counts = {r[0]: int(r[1]) for r in rows[1:]}
    assert len(set(counts.values())) == 1  # bitmap and ie agree

    out = tmp_path / "walk.csv"
    res = runner.invoke(main, ["--seed", "5", "--out", str(out), "walk",
                               "--instance", str(inst),
                               "--trials", "4", "--steps", "200"])
    assert res.exit_code == 0
    rows = _rows(out)
    assert rows[0] == ["trial", "first_exit_step_or_-1", "acceptance_rate"]
    assert len(rows) == 5

    out = tmp_path / "dec.csv"
    res = runner.invoke(main, ["--seed", "6", "--out", str(out), "decimate",
                               "--estimator", "belief",
                               "--instance", str(inst)])
    assert res.exit_code == 0
    rows = _rows(out)
    assert rows[0] == ["step", "variable", "value",
                       "n_compatible_clusters", "max_bias"]
    assert len(rows) == 13
    assert all(0.5 <= float(r[4]) <= 1.0 for r in rows[1:])


def test_reruns_byte_identical(runner, tmp_path):
    inst = tmp_path / "inst.json"
    runner.invoke(main, ["--seed", "3", "--out", str(inst), "instance",
                         "gen", "--n", "12", "--alpha", "0.75", "--p", "0.7"])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        res = runner.invoke(main, ["--seed", "9", "--out", str(out), "walk",
                                   "--instance", str(inst),
                                   "--trials", "3", "--steps", "100"])
        assert res.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_xsat_output(runner, tmp_path):
    out = tmp_path / "xsat.csv"
    res = runner.invoke(main, ["--out", str(out), "xsat", "--p", "0.95",
                               "--xsteps", "16"])
    assert res.exit_code == 0
    rows = _rows(out)
    assert rows[0] == ["x0", "alpha_sep", "alpha_gap", "alpha_c"]
    assert rows[2] == ["x", "alpha_s"]
    assert len(rows) == 3 + 16


def test_energy_diagram_json(runner, tmp_path):
    out = tmp_path / "diag.json"
    res = runner.invoke(main, ["--format", "json", "--out", str(out),
                               "energy", "diagram", "--a", "-0.05",
                               "--b", "0", "--c", "0.5", "--p", "0.6",
                               "--tmin", "1.0", "--tmax", "1.4",
                               "--tsteps", "5"])
    assert res.exit_code == 0
    doc = json.loads(out.read_text())
    assert len(doc["curve"]) == 5
    assert doc["units"] == "bits"
    assert set(doc["curve"][0]) == {"T", "e_eq", "e_dyn", "m"}


def test_energy_quench_csv(runner, tmp_path):
    out = tmp_path / "q.csv"
    res = runner.invoke(main, ["--seed", "2", "--out", str(out), "energy",
                               "quench", "--a", "-0.05", "--b", "0",
                               "--c", "0.5", "--p", "0.6", "--n", "16",
                               "--t", "1.0", "--sweeps", "20"])
    assert res.exit_code == 0
    rows = _rows(out)
    assert rows[0] == ["sweep", "energy"]
    assert len(rows) == 21
