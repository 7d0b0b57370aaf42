import math
import os
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from ddicool import cli
from ddicool.experiments import runner
from ddicool.experiments.runner import (
    HEXAGON_SUBSETS,
    evaluate_point,
    match_ratios,
    run_hexagon_suite,
    run_isosceles_sweep,
    run_magic_atlas,
    run_scenario,
    run_spacing_sweep,
)
from ddicool.experiments.scenario import (
    GeometrySpec,
    Scenario,
    ScenarioError,
    SweepRecord,
    SweepSpec,
    dump_scenario,
    load_scenario,
    parse_scenario,
    read_records,
    render_records,
    write_records,
)
from ddicool.steady import DegenerateSteadyStateError

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


# -- scenario files ------------------------------------------------------------

def test_round_trip():
    scn = Scenario(
        geometry=GeometrySpec("hexagon", vertices=(0, 1, 3)), spacing=0.5, theta=1.0,
        gamma=0.2, delta=-0.9, eta_omega=0.03, n_cut=2,
        sweep=(SweepSpec("spacing", 0.1, 0.9, 5), SweepSpec("delta", -1.1, -0.9, 3)),
        output="x.csv", method="trace", jobs=2,
    )
    assert parse_scenario(dump_scenario(scn)) == scn
    assert parse_scenario(dump_scenario(Scenario())) == Scenario()
    assert parse_scenario("") == Scenario()


@pytest.mark.parametrize(
    "text, path, line",
    [
        ("gamma: 0.1\nbogus: 1\n", "bogus", 2),
        ("geometry:\n  kind: line\n  colour: red\n", "geometry.colour", 3),
        ("sweep:\n  variable: spacing\n  start: 0\n  stop: 1\n  points: 3\n  step: 2\n", "sweep.step", 6),
    ],
)
def test_unknown_key_names_path_and_line(text, path, line):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.path == path
    assert info.value.line == line
    assert "unknown key" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "gamma: fast\n",
        "gamma: -0.1\n",
        "n_cut: 1.5\n",
        "n_cut: 0\n",
        "spacing: -1\n",
        "geometry: {kind: ring}\n",
        "method: magic\n",
        "sweep: {variable: colour, start: 0, stop: 1, points: 2}\n",
        "sweep: {variable: spacing, start: 0, stop: 1}\n",
        "gamma: [0.1\n",
        "- 1\n- 2\n",
    ],
)
def test_schema_errors(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


# -- records -------------------------------------------------------------------

def _record():
    rows = [{"sweep_value": 0.1 * k, "n_multi": 1 / 3, "n_single": 2 / 3, "ratio": 0.5,
             "g12": math.pi, "gamma12": math.e, "residual": 1e-15, "error": ""} for k in range(3)]
    return SweepRecord("demo", "spacing", rows)


def test_record_header_and_precision():
    text = render_records(_record())
    comments = [ln for ln in text.splitlines() if ln.startswith("#")]
    assert any("units" in ln for ln in comments)
    header = text.splitlines()[len(comments)]
    assert header.split(",") == list(_record().columns)
    assert "3.14159265359" in text  # 12 significant digits
    assert "0.333333333333" in text


def test_write_is_atomic_and_readable(tmp_path):
    target = tmp_path / "out.csv"
    target.write_text("old contents")
    write_records(_record(), target)
    assert sorted(os.listdir(tmp_path)) == ["out.csv"]
    rows = read_records(target)
    assert len(rows) == 3 and rows[1]["ratio"] == 0.5 and rows[0]["error"] == ""


def test_write_failure_leaves_target(tmp_path, monkeypatch):
    target = tmp_path / "out.csv"
    target.write_text("old contents")

    def boom(*a):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_records(_record(), target)
    assert target.read_text() == "old contents"
    assert sorted(os.listdir(tmp_path)) == ["out.csv"]


# -- runner --------------------------------------------------------------------

def test_evaluate_point_flags_errors():
    row = evaluate_point(Scenario(eta_omega=0.0))
    assert row["error"].startswith("ValueError") and math.isnan(row["ratio"])
    row = evaluate_point(Scenario(geometry=GeometrySpec("line"), spacing=0.5))
    assert row["error"] == "" and row["residual"] < 1e-10


def test_sweep_is_deterministic(tmp_path):
    scn = Scenario(geometry=GeometrySpec("line"), sweep=(SweepSpec("spacing", 0.2, 0.8, 6),))
    a = run_scenario(scn, "d", jobs=1)
    b = run_scenario(scn, "d", jobs=2)
    write_records(a, tmp_path / "a.csv")
    write_records(b, tmp_path / "b.csv")
    write_records(run_scenario(scn, "d", jobs=1), tmp_path / "c.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "c.csv").read_bytes()


def test_two_dimensional_sweep_layout():
    scn = Scenario(geometry=GeometrySpec("line"), sweep=(
        SweepSpec("spacing", 0.3, 0.6, 3), SweepSpec("delta", -1.05, -0.95, 2)))
    rec = run_scenario(scn)
    assert rec.columns[:2] == ("sweep_value", "delta")
    assert len(rec.rows) == 6
    assert [r["sweep_value"] for r in rec.rows[:2]] == [0.3, 0.3]


def test_shipped_scenario_reproduces_spacing_sweep(s_m):
    scn = load_scenario(SCENARIOS / "two_atom_spacing.yaml")
    from_file = run_scenario(scn, "spacing sweep (line)")
    direct = run_spacing_sweep("line", (0.05, 1.0), 191)
    assert render_records(from_file) == render_records(direct)
    s, ratio = from_file.column("sweep_value"), from_file.column("ratio")
    assert np.all(np.isfinite(ratio))
    # interpolated ratio at the magic spacing sits at the two-atom value
    assert np.interp(s_m, s, ratio) == pytest.approx(0.9456, abs=0.005)
    # large spacing approaches the isolated atom
    assert abs(ratio[-1] - 1) < 0.1


def test_isosceles_sweep_limits():
    rec = run_isosceles_sweep((0.02 * math.pi, math.pi), 3)
    ratio = rec.column("ratio")
    equilateral = run_isosceles_sweep((math.pi / 3, math.pi / 3), 1).column("ratio")[0]
    assert equilateral == pytest.approx(0.875, abs=0.01)
    # spectators nearly on top of each other behave like one strongly coupled partner
    assert np.isfinite(ratio[0])
    # a straight line with the target in the middle cools, but less than the triangle
    assert equilateral < ratio[-1] < 1.0


def test_atlas_rows_are_magic():
    rec = run_magic_atlas(theta_points=7)
    assert len(rec.rows) > 7
    g = rec.column("g12")
    assert np.max(np.abs(g)) < 1e-10 * 0.1
    assert np.all(np.abs(rec.column("gamma12")) < 0.1)


def test_hexagon_suite_labels():
    rec = run_hexagon_suite([(0, 2, 4)])
    assert rec.rows[0]["vertices"] == "0-2-4" and rec.rows[0]["sweep_value"] == 4
    assert len(HEXAGON_SUBSETS) == 6


def test_match_ratios():
    mapping, err = match_ratios({"a": 0.5, "b": 0.9, "c": 0.7}, [0.88, 0.52])
    assert mapping == {0: "b", 1: "a"} and err == pytest.approx(0.02)
    with pytest.raises(ValueError):
        match_ratios({"a": 1.0}, [1.0, 2.0])


# -- command line ----------------------------------------------------------------

def test_cli_magic(capsys):
    assert cli.main(["magic"]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith("0.71329263")


def test_cli_couplings(capsys):
    assert cli.main(["couplings", "--config", str(SCENARIOS / "triangle_spacing.yaml")]) == 0
    out = capsys.readouterr().out
    assert "# shifts / Gamma" in out and "# decays / Gamma" in out


def test_cli_steady_and_file_output(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["steady", "--spacing", "0.5", "--out", str(out)]) == 0
    assert read_records(out)[0]["ratio"] == pytest.approx(1.0)


def test_cli_sweeps(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep-spacing", "--points", "3", "--out", str(out), "--jobs", "1"]) == 0
    assert len(read_records(out)) == 3
    assert cli.main(["sweep-angle", "--points", "2", "--out", str(out), "--jobs", "1"]) == 0
    assert cli.main(["sweep-detuning", "--points", "2", "2", "--out", str(out), "--jobs", "1"]) == 0
    assert len(read_records(out)) == 4
    assert cli.main(["hexagon", "--vertices", "0,2,4", "--out", str(out), "--jobs", "1"]) == 0
    assert read_records(out)[0]["vertices"] == "0-2-4"


def test_cli_scenario_error(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("geometry:\n  kind: line\n  bogus: 1\n")
    assert cli.main(["steady", "--config", str(bad)]) == 2
    assert "geometry.bogus (line 3)" in capsys.readouterr().err
    assert cli.main(["steady", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert cli.main(["steady", "--eta-omega", "0"]) == 2


def test_cli_solver_error(monkeypatch, capsys):
    def degenerate(*a, **k):
        raise DegenerateSteadyStateError("degenerate steady state")

    monkeypatch.setattr(runner, "steady_state", degenerate)
    assert cli.main(["steady", "--spacing", "0.4"]) == 3
    assert "degenerate" in capsys.readouterr().out


@pytest.mark.parametrize("name", ["two_atom_spacing", "triangle_spacing"])
def test_spacing_sweep_minimum_near_magic(name, s_m):
    rec = run_scenario(load_scenario(SCENARIOS / f"{name}.yaml"))
    k = int(np.argmin(rec.column("ratio")))
    assert abs(rec.rows[k]["sweep_value"] - s_m) < 0.02
    assert all(r["error"] == "" for r in rec.rows)
