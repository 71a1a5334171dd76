"""End-to-end command line runs, in process via main(argv)."""

import csv
import io
import json

import pytest

from uwjam.cli import DEFAULT_SWEEP, REPORT_COLUMNS, ScenarioConfig, main
from uwjam.errors import ConfigError
from uwjam.solver import load_table


SMALL_SCENARIO = {
    "k": 2,
    "b_t0": 12,
    "b_j0": 8,
    "horizon": 3,
    "sweep": [50, 60],
}


def _read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config:")
    reader = csv.DictReader(io.StringIO("\n".join(lines[1:])))
    return lines[0], reader.fieldnames, list(reader)


@pytest.fixture(scope="module")
def scenario(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "scenario.json"
    path.write_text(json.dumps(SMALL_SCENARIO))
    return str(path)


@pytest.fixture(scope="module")
def tables_dir(tmp_path_factory, scenario):
    out = tmp_path_factory.mktemp("tables")
    rc = main(["solve", "--config", scenario, "--sweep", "--out-dir", str(out)])
    assert rc == 0
    return out


# ---------------------------------------------------------------------------
# per-sweep


def test_per_sweep_stdout(capsys):
    assert main(["per-sweep"]) == 0
    comment, header, rows = _read_csv(capsys.readouterr().out)
    assert header == ["distance_m", "per_clear", "per_blocked"]
    assert len(rows) == len(DEFAULT_SWEEP)
    for row in rows:
        pc, pb = float(row["per_clear"]), float(row["per_blocked"])
        assert 0.0 <= pc <= 1.0 and 0.0 <= pb <= 1.0
        assert pb >= pc


def test_per_sweep_to_file(tmp_path, scenario):
    out = tmp_path / "sweep.csv"
    assert main(["per-sweep", "--config", scenario, "--out", str(out)]) == 0
    comment, header, rows = _read_csv(out.read_text())
    assert [float(r["distance_m"]) for r in rows] == [50.0, 60.0]
    # the config comment reproduces the resolved scenario
    cfg = ScenarioConfig.from_dict(json.loads(comment[len("# config: "):]))
    assert cfg.k == 2 and cfg.sweep == (50, 60)


def test_per_sweep_empirical(tmp_path):
    curve = tmp_path / "curve.csv"
    curve.write_text(
        "# measured lake run\n"
        "distance_m,per_blocked\n"
        "40,0.9\n"
        "80,0.5\n")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "sweep": [40, 60, 80],
        "per_mode": "empirical",
        "empirical_path": str(curve),
        "empirical_per_clear": 0.02,
    }))
    out = tmp_path / "out.csv"
    assert main(["per-sweep", "--config", str(cfg_path), "--out", str(out)]) == 0
    _, _, rows = _read_csv(out.read_text())
    assert [float(r["per_clear"]) for r in rows] == [0.02] * 3
    assert [float(r["per_blocked"]) for r in rows] == [0.9, 0.7, 0.5]


# ---------------------------------------------------------------------------
# solve and inspect


def test_solve_single(tmp_path, scenario):
    out = tmp_path / "table.json"
    rc = main(["solve", "--config", scenario, "--d-jr", "60", "--out", str(out)])
    assert rc == 0
    table = load_table(out)
    assert table.meta == {"d_jr": 60.0, "per_mode": "uncoded"}
    assert table.config.k == 2 and table.config.b_t0 == 12


def test_solve_needs_distance_and_out(scenario):
    assert main(["solve", "--config", scenario, "--d-jr", "60"]) == 2
    assert main(["solve", "--config", scenario, "--out", "x.json"]) == 2
    assert main(["solve", "--config", scenario, "--sweep"]) == 2


def test_solve_sweep_writes_one_table_per_distance(tables_dir):
    names = sorted(p.name for p in tables_dir.iterdir())
    assert names == ["table_djr50m.json", "table_djr60m.json"]
    for name in names:
        load_table(tables_dir / name)


def test_inspect_table(tables_dir, capsys):
    path = str(tables_dir / "table_djr60m.json")
    assert main(["inspect-table", "--table", path]) == 0
    out = capsys.readouterr().out
    assert "uwjam-strategy-table" in out
    assert "states: " in out
    assert "initial state (12, 8)" in out

    assert main(["inspect-table", "--table", path, "--state", "12,8"]) == 0
    out = capsys.readouterr().out
    assert "state (12, 8)" in out and "send:" in out and "jam: " in out

    assert main(["inspect-table", "--table", path, "--state", "banana"]) == 2


# ---------------------------------------------------------------------------
# evaluate


def test_evaluate_sorts_by_distance(tmp_path, scenario, tables_dir):
    out = tmp_path / "report.csv"
    rc = main(["evaluate", "--config", scenario,
               "--table", str(tables_dir / "table_djr60m.json"),
               "--table", str(tables_dir / "table_djr50m.json"),
               "--out", str(out)])
    assert rc == 0
    _, header, rows = _read_csv(out.read_text())
    assert header == REPORT_COLUMNS
    assert [float(r["distance_m"]) for r in rows] == [50.0, 60.0]
    for row in rows:
        assert 0.0 <= float(row["psucc"]) <= 1.0
        assert 0.0 <= float(row["psucc_first_frame"]) <= 1.0
        assert float(row["lifetime"]) > 0.0
        # closed-form rows carry no Monte Carlo fields
        assert row["sigma"] == "" and row["lifetime_ci"] == ""


def test_evaluate_rejects_mismatched_scenario(tmp_path, scenario, tables_dir):
    other = tmp_path / "other.json"
    other.write_text(json.dumps(dict(SMALL_SCENARIO, alpha=0.8)))
    rc = main(["evaluate", "--config", str(other),
               "--table", str(tables_dir / "table_djr50m.json")])
    assert rc == 4


# ---------------------------------------------------------------------------
# simulate and sensitivity


def test_simulate(tmp_path, scenario, tables_dir, capsys):
    out = tmp_path / "sim.csv"
    rc = main(["simulate", "--config", scenario,
               "--table", str(tables_dir / "table_djr50m.json"),
               "--runs", "50", "--seed", "7", "--out", str(out)])
    assert rc == 0
    _, header, rows = _read_csv(out.read_text())
    assert header == REPORT_COLUMNS
    assert len(rows) == 1
    row = rows[0]
    assert row["psucc_first_frame"] == ""  # simulation has no per-frame split
    assert float(row["lifetime_ci"]) >= 0.0
    assert row["sigma"] == "0.0"


def test_simulate_default_seed_warns(scenario, tables_dir, capsys):
    rc = main(["simulate", "--config", scenario,
               "--table", str(tables_dir / "table_djr50m.json"),
               "--runs", "20"])
    assert rc == 0
    assert "12345" in capsys.readouterr().err


def test_sensitivity(tmp_path, scenario, tables_dir):
    out = tmp_path / "sens.csv"
    rc = main(["sensitivity", "--config", scenario,
               "--table", str(tables_dir / "table_djr50m.json"),
               "--sigma", "0.0", "--sigma", "0.1",
               "--runs", "30", "--seed", "11", "--out", str(out)])
    assert rc == 0
    _, _, rows = _read_csv(out.read_text())
    assert [r["sigma"] for r in rows] == ["0.0", "0.1"]
    # action draws are independent of the jitter, so lifetimes agree
    assert rows[0]["lifetime"] == rows[1]["lifetime"]


# ---------------------------------------------------------------------------
# mismatch


def test_mismatch_single_distance(tmp_path, scenario):
    out = tmp_path / "mm.csv"
    rc = main(["mismatch", "--config", scenario, "--d-jr", "50",
               "--solve-model", "uncoded", "--true-model", "uncoded",
               "--out", str(out)])
    assert rc == 0
    _, _, rows = _read_csv(out.read_text())
    assert len(rows) == 1
    assert rows[0]["solve_model"] == "uncoded"
    assert rows[0]["true_model"] == "uncoded"


def test_mismatch_dummy_jammer_baseline(tmp_path, scenario):
    out = tmp_path / "mm.csv"
    rc = main(["mismatch", "--config", scenario, "--d-jr", "50",
               "--solve-model", "dummy", "--true-model", "uncoded",
               "--out", str(out)])
    assert rc == 0
    _, _, rows = _read_csv(out.read_text())
    assert rows[0]["solve_model"] == "dummy"
    assert 0.0 <= float(rows[0]["psucc"]) <= 1.0


# ---------------------------------------------------------------------------
# failure modes and exit codes


def test_exit_codes(tmp_path, tables_dir):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{nope")
    assert main(["per-sweep", "--config", str(bad_json)]) == 2

    unknown_key = tmp_path / "unknown.json"
    unknown_key.write_text(json.dumps({"granularity": 5}))
    assert main(["per-sweep", "--config", str(unknown_key)]) == 2

    no_path = tmp_path / "emp.json"
    no_path.write_text(json.dumps({"per_mode": "empirical"}))
    assert main(["per-sweep", "--config", str(no_path)]) == 2

    assert main(["per-sweep", "--config", str(tmp_path / "missing.json")]) == 3
    assert main(["inspect-table", "--table", str(tmp_path / "missing.json")]) == 3

    fake = tmp_path / "fake.json"
    fake.write_text(json.dumps({"format": "nope"}))
    assert main(["inspect-table", "--table", str(fake)]) == 4


def test_scenario_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"granularity": 5})
