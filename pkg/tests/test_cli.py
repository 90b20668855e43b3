"""Command-line entry point."""

import csv
import json

import pytest

import jadce
from experiments.output import read_csv

TINY = ["--set", "num_users=120", "--set", "num_aps=2", "--threads", "1"]


def read_rows(path):
    with open(path, newline="") as source:
        return list(csv.DictReader(source))


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        jadce.main(["--version"])
    assert info.value.code == 0
    assert "JADCE" in capsys.readouterr().out


def test_unknown_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit) as info:
        jadce.main(["mse-vs-everything"])
    assert info.value.code == 2


def test_values_rejected_for_fixed_point(tmp_path):
    with pytest.raises(SystemExit) as info:
        jadce.main(["fixed-point", "--values", "1,2", "--out", str(tmp_path)])
    assert info.value.code == 2


def test_inactive_network_fixed_point(tmp_path, capsys):
    code = jadce.main(["fixed-point", "--set", "activity_prob=0", "--out", str(tmp_path)])
    assert code == 0
    rows = read_rows(tmp_path / "fixed_point.csv")
    assert [row["method"] for row in rows] == ["StateEvolution", "Property1"]
    for row in rows:
        assert float(row["sigma_eff_sq"]) == pytest.approx(1e-3)
        assert float(row["sigma_peff_sq"]) == pytest.approx(1e-3)
    assert "sigma_eff^2 = 0.001" in capsys.readouterr().out


def test_run_writes_report_and_summary(tmp_path):
    out = tmp_path / "run"
    code = jadce.main(["mse-vs-pilots", "--values", "30,40", "--trials", "2", "--seed", "5", "--out", str(out)] + TINY)
    assert code == 0
    rows = read_csv(out / "mse_vs_pilots.csv")
    assert {row.method for row in rows} == set(jadce.MSE_METHODS)
    assert {row.sweep_value for row in rows} == {30.0, 40.0}
    assert all(row.seed == 5 for row in rows)

    summary = json.loads((out / "summary.json").read_text())
    assert summary["success"] is True
    assert summary["seed"] == 5
    assert summary["config"]["num_users"] == 120
    assert "mse_vs_pilots.csv" in summary["files"]

    report = (out / "report.txt").read_text()
    assert "Completed: yes" in report
    assert "mse_vs_pilots.csv" in report
    assert "-" * 80 in report


def test_stalled_amp_runs_fail_the_run(tmp_path, capsys):
    out = tmp_path / "run"
    args = ["mse-vs-pilots", "--values", "40", "--trials", "2", "--set", "max_iters=1", "--out", str(out)]
    assert jadce.main(args + TINY) == 1
    assert "did not converge" in capsys.readouterr().err

    rows = {row.method: row for row in read_csv(out / "mse_vs_pilots.csv")}
    assert set(rows) == set(jadce.MSE_METHODS)

    summary = json.loads((out / "summary.json").read_text())
    assert summary["success"] is True
    stalled = " ".join(summary["unconverged"])
    assert "SmvCbamp" in stalled
    assert "MmvAmp" in stalled
    assert "OracleExact" not in stalled
    assert "iteration limit" in (out / "report.txt").read_text()


def test_same_seed_same_bytes(tmp_path):
    args = ["lrt-single", "--sweep", "pilots", "--values", "30,40", "--trials", "2", "--seed", "7"] + TINY
    assert jadce.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert jadce.main(args + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    first = (tmp_path / "a" / "lrt_vs_pilots.csv").read_bytes()
    second = (tmp_path / "b" / "lrt_vs_pilots.csv").read_bytes()
    assert first == second


def test_existing_outputs_need_force(tmp_path, capsys):
    args = ["oracle-asym", "--out", str(tmp_path)]
    assert jadce.main(args) == 0
    assert jadce.main(args) == 1
    assert "FAILED" in capsys.readouterr().out
    assert jadce.main(args + ["--force"]) == 0


def test_config_file(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("activity_prob = 0.1\nsnr_db = 40\n")
    out = tmp_path / "out"
    assert jadce.main(["oracle-asym", "--config", str(config), "--out", str(out)]) == 0
    rows = read_rows(out / "oracle_asym.csv")
    assert float(rows[0]["lam"]) == 0.1
    assert float(rows[0]["snr_db"]) == pytest.approx(40.0)


def test_bad_config_key_is_an_error(tmp_path, capsys):
    assert jadce.main(["oracle-asym", "--set", "pilots=3", "--out", str(tmp_path)]) == 1
    assert "Error:" in capsys.readouterr().err


def test_dump_scene(tmp_path):
    out = tmp_path / "dump"
    args = ["detect-centralized", "--values", "2", "--trials", "1", "--dump-scene", "--out", str(out)] + TINY
    assert jadce.main(args) == 0
    assert (out / "scene.npz").exists()
    lines = (out / "amp_trace.csv").read_text().splitlines()
    assert lines[0] == "iter,mean_tau,empirical_mse"
    assert len(lines) > 1


@pytest.mark.slow
def test_reproduce_all_writes_every_table(tmp_path):
    out = tmp_path / "all"
    code = jadce.main(["reproduce-all", "--desk-scale", "--trials", "1", "--out", str(out)] + TINY)
    assert code == 0
    expected = {
        "mse_vs_pilots.csv",
        "mse_vs_snr.csv",
        "lrt_vs_pilots.csv",
        "lrt_vs_snr.csv",
        "detect_centralized.csv",
        "detect_distributed.csv",
    }
    assert expected <= {path.name for path in out.iterdir()}
