import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fefficient import cli
from fefficient.cli import main, write_csv
from fefficient.errors import OutputError, UnstableSystem, ValidationError
from fefficient.published import THREE_BANK_CLOSEST_TO_DIVERSE, THREE_BANK_CLOSEST_TO_DIVERSIFIED
from fefficient.scenarios import builtin_scenario, save_scenario


def read_matrix(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return np.array([[float(x) for x in r[1:]] for r in rows[1:]])


def run(tmp_path, *argv, out="out"):
    return main(list(argv) + ["--output-dir", str(tmp_path / out)])


def test_significance_on_l(tmp_path, capsys):
    assert run(tmp_path, "significance", "--scenario", "L") == 0
    text = capsys.readouterr().out
    assert "v = 1.23" in text and "< 1" in text
    info = json.loads((tmp_path / "out" / "significance.json").read_text())
    np.testing.assert_allclose(info["v"], (1.23, 1.37), atol=0.01)
    assert info["spectral_bound"] < 1
    assert read_matrix(tmp_path / "out" / "systemicness.csv").shape == (10, 10)


def test_solve_three_bank_fixture(tmp_path):
    assert run(tmp_path, "solve", "--scenario", "B") == 0
    out = tmp_path / "out"
    np.testing.assert_allclose(read_matrix(out / "holdings_closest_to_diversified.csv"),
                               THREE_BANK_CLOSEST_TO_DIVERSIFIED, atol=1e-12)
    np.testing.assert_allclose(read_matrix(out / "holdings_closest_to_diverse.csv"),
                               THREE_BANK_CLOSEST_TO_DIVERSE, atol=1e-12)
    info = json.loads((out / "solve.json").read_text())
    assert info["null_dimension"] == 2
    assert info["diversification_efficient"] is False


def test_validate_negative_variance(tmp_path, capsys):
    tree = builtin_scenario("L").to_dict()
    tree["shock"]["variance"][2] = -0.04
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(tree))
    assert run(tmp_path, "validate", "--scenario", str(path)) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("ERROR VALIDATION_SIGMA:")
    assert not (tmp_path / "out").exists()


def test_override_flag(tmp_path, capsys):
    assert run(tmp_path, "validate", "--set", "assets.sigma2.0=-1") == 2
    assert "VALIDATION_SIGMA" in capsys.readouterr().err
    assert run(tmp_path, "validate", "--set", "run.seed=5") == 0
    assert json.loads((tmp_path / "out" / "scenario.json").read_text())["run"]["seed"] == 5


def test_error_codes(tmp_path, capsys):
    assert run(tmp_path, "validate", "--scenario", str(tmp_path / "missing.json")) == 2
    assert "PARSE_IO" in capsys.readouterr().err
    bad = tmp_path / "syntax.json"
    bad.write_text("{\n oops\n}")
    assert run(tmp_path, "validate", "--scenario", str(bad)) == 2
    assert "PARSE_SYNTAX" in capsys.readouterr().err
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["validate", "--output-dir", str(blocker / "sub")]) == 4
    assert main(["validate", "--workers", "0", "--output-dir", str(tmp_path / "w")]) == 2


def test_write_csv_empty_table(tmp_path):
    path = tmp_path / "e.csv"
    write_csv({"a": [], "b": []}, path)
    assert path.read_bytes() == b"a,b\n"


def test_write_csv_round_trip(tmp_path, rng):
    values = np.concatenate([rng.normal(size=50) * 10.0 ** rng.integers(-20, 20, 50), [0.1, 1 / 3, -0.0]])
    path = tmp_path / "r.csv"
    write_csv({"x": values, "i": np.arange(values.size)}, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    back = np.array([float(r[0]) for r in rows])
    assert back.tobytes() == values.tobytes()
    assert [int(r[1]) for r in rows] == list(range(values.size))


def test_write_csv_errors(tmp_path):
    with pytest.raises(ValidationError):
        write_csv({"a": [1.0], "b": [1.0, 2.0]}, tmp_path / "x.csv")
    with pytest.raises(OutputError) as err:
        write_csv({"a": [1.0]}, tmp_path / "nodir" / "x.csv")
    assert "nodir" in str(err.value)


def test_sweep_columns(tmp_path):
    assert run(tmp_path, "sweep", "--parameter", "sigma1_sq", "--points", "11") == 0
    with open(tmp_path / "out" / "sweep_sigma1_sq.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["param", "q11", "q21", "distance"]
    assert len(rows) == 12
    assert run(tmp_path, "sweep", out="all") == 0
    assert sorted(p.name for p in (tmp_path / "all").iterdir()) == [
        "sweep_mu2.csv", "sweep_sigma1_sq.csv", "sweep_v2.csv"]


def test_liquidation_verb(tmp_path):
    assert run(tmp_path, "liquidation", "--scenario", "H") == 0
    info = json.loads((tmp_path / "out" / "liquidation.json").read_text())
    assert info["msd_most_liquid"] <= info["msd_scenario_strategy"]
    alpha = read_matrix(tmp_path / "out" / "liquidation_strategy.csv")
    np.testing.assert_allclose(alpha.sum(axis=0), 1.0)


def test_simulate_outputs_are_byte_identical(tmp_path):
    args = ["simulate", "--scenario", "I", "--samples", "5000", "--seed", "9"]
    assert run(tmp_path, *args, out="a") == 0
    assert run(tmp_path, *args, "--workers", "3", out="b") == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["density_diversified.csv", "density_f_efficient.csv", "samples_diversified.csv",
                     "samples_f_efficient.csv", "summary.json"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    with open(tmp_path / "a" / "samples_f_efficient.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert header == ["sample_index", "d_exact", "mc_e", "mc_f"]


def test_failed_command_keeps_existing_dir_clean(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    (out / "keep.txt").write_text("x")
    with pytest.warns(RuntimeWarning):
        assert run(tmp_path, "simulate", "--holdings", "custom", "--set", "banks.kappa=[900, 1000]") == 3
    assert sorted(p.name for p in out.iterdir()) == ["keep.txt"]


def test_partial_output_removed(tmp_path, monkeypatch, capsys):
    def half_done(args, staging):
        write_csv({"a": [1.0]}, staging / "partial.csv")
        raise UnstableSystem("late failure")

    monkeypatch.setitem(cli.HANDLERS, "validate", half_done)
    existing = tmp_path / "existing"
    existing.mkdir()
    assert main(["validate", "--output-dir", str(existing)]) == 3
    assert list(existing.iterdir()) == []
    assert run(tmp_path, "validate", out="fresh") == 3
    assert not (tmp_path / "fresh").exists()
    assert "ERROR UNSTABLE" in capsys.readouterr().err


def test_scenario_file_input(tmp_path):
    path = tmp_path / "h.json"
    save_scenario(builtin_scenario("H"), path)
    assert run(tmp_path, "significance", "--scenario", str(path)) == 0
    info = json.loads((tmp_path / "out" / "significance.json").read_text())
    np.testing.assert_allclose(info["v"], (5.54, 6.16), atol=0.01)


def test_reproduce_paper_report(tmp_path):
    status = run(tmp_path, "reproduce-paper", out="r1")
    assert run(tmp_path, "reproduce-paper", out="r2") == status
    report = (tmp_path / "r1" / "report.txt").read_text()
    assert report == (tmp_path / "r2" / "report.txt").read_text()
    last = report.strip().splitlines()[-1]
    assert status == (0 if last == "OVERALL PASS" else 1)
    assert all(line.split()[0] in ("[PASS]", "[FAIL]", "[INFO-PASS]", "[INFO-FAIL]")
               for line in report.strip().splitlines()[:-1])


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fefficient", "validate", "--scenario", "B",
                           "--output-dir", str(tmp_path / "m")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "valid" in proc.stdout
