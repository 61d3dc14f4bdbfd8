import csv
import json

import pytest

from sidwave import cli
from sidwave.config import DEFAULTS, ExperimentConfig, parse_override
from sidwave.model import ConfigurationError

FAST = ["--override", "horizon=4", "--override", "grid.dr=0.1"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_parse_override_types():
    assert parse_override("model.p=3.5") == {"model": {"p": 3.5}}
    assert parse_override("model.n=2") == {"model": {"n": 2}}
    assert parse_override("data.profile=truncated_gaussian") == {"data": {"profile": "truncated_gaussian"}}
    assert parse_override("sweep.p_list=[2, 3]") == {"sweep": {"p_list": [2, 3]}}
    with pytest.raises(ConfigurationError):
        parse_override("model.p")


def test_config_defaults_and_rmax():
    cfg = ExperimentConfig.from_dict({"horizon": 20.0, "grid": {"margin": 3.0}})
    g = cfg.grid()
    assert g.r_max == pytest.approx(1.0 + 20.0 + 3.0)
    assert g.dr == pytest.approx(DEFAULTS["grid"]["dr"], rel=0.01)
    assert cfg.grid(horizon=50.0).r_max == pytest.approx(54.0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"model": {"colour": 1}})
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"data": {"profile": "square"}})


def test_weight_selection():
    auto = ExperimentConfig.from_dict({"model": {"mu": 50.0, "p": 4.0}, "weight": {"delta": "auto"}})
    assert auto.weight().delta == pytest.approx(4.0 / 7.0)
    assert auto.feasibility_eps() == pytest.approx(1.0 / 3.0)
    pl = ExperimentConfig.from_dict({"model": {"beta": 2.0}})
    assert pl.weight().a == 0.0
    bad = ExperimentConfig.from_dict({"model": {"p": 2.0}, "weight": {"delta": "auto"}})
    with pytest.raises(ConfigurationError):
        bad.weight()


def test_run_outputs(tmp_path):
    assert cli.main(["run", "--out", str(tmp_path), *FAST]) == 0
    rows = _rows(tmp_path / "run.csv")
    assert rows[0] == ["t", "l2", "weighted_l2", "weighted_energy", "supnorm"]
    assert float(rows[1][0]) == 0.0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "completed"
    assert set(summary["exponents"]) == {"l2", "weighted_l2", "weighted_energy"}
    assert summary["config"]["model"]["p"] == 2.0
    assert summary["data_sign_functional"] > 0


def test_run_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", "--out", str(a), *FAST]) == 0
    assert cli.main(["run", "--out", str(b), *FAST]) == 0
    assert (a / "run.csv").read_bytes() == (b / "run.csv").read_bytes()


def test_zero_amplitude(tmp_path):
    assert cli.main(["run", "--out", str(tmp_path), *FAST, "--override", "data.amplitude=0"]) == 0
    rows = _rows(tmp_path / "run.csv")[1:]
    assert all(float(x) == 0.0 for row in rows for x in row[1:])
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "completed" and "exponents" in summary


def test_blowup_is_exit_zero(tmp_path):
    code = cli.main(["run", "--out", str(tmp_path), "--override", "horizon=10"])
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert code == 0 and summary["status"] == "blowup_detected"
    assert summary["t_star"] == pytest.approx(8.86, rel=1e-2)
    assert "exponents" not in summary


def test_config_file(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text('horizon = 3.0\n[model]\nnonlinearity = "none"\nmu = 5.0\n[outputs]\ncsv_path = "series.csv"\n')
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "series.csv").exists()
    (tmp_path / "broken.toml").write_text("horizon = [")
    assert cli.main(["run", "--config", str(tmp_path / "broken.toml"), "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("argv", [
    ["run", "--override", "model.n=7"],
    ["run", "--override", "nope=1"],
    ["run", "--config", "/nonexistent.toml"],
    ["feasibility", "--n", "1", "--p", "2.5"],
    ["diffusion", "--override", "model.mu=0", "--override", "model.nonlinearity=none"],
    ["diffusion"],
    ["testfn", "--override", "horizon=10", "--R-list", "8,16"],
    ["run", "--jobs", "0"],
])
def test_config_errors_exit_2(tmp_path, argv):
    assert cli.main([*argv, "--out", str(tmp_path)]) == 2


def test_instability_exit_3(tmp_path):
    argv = ["run", "--out", str(tmp_path), "--override", "control.cfl=1.5",
            "--override", "model.nonlinearity=none", "--override", "horizon=30"]
    assert cli.main(argv) == 3


def test_sweep_p_order_invariant(tmp_path):
    base = ["--override", "horizon=12", "--override", "grid.dr=0.1", "--bisect", "0"]
    assert cli.main(["sweep-p", "--out", str(tmp_path / "a"), "--p-list", "4,2", *base]) == 0
    assert cli.main(["sweep-p", "--out", str(tmp_path / "b"), "--p-list", "2,4", "--jobs", "2", *base]) == 0
    a = (tmp_path / "a" / "sweep_p.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep_p.csv").read_bytes()
    rows = _rows(tmp_path / "a" / "sweep_p.csv")
    assert [r[0] for r in rows[1:]] == ["2.0", "4.0"]
    assert rows[1][1] == "blowup_detected"


def test_sweep_p_empty(tmp_path):
    assert cli.main(["sweep-p", "--out", str(tmp_path), "--p-list", ""]) == 0
    assert _rows(tmp_path / "sweep_p.csv") == [["p", "status", "t_star", "weighted_l2_exponent", "global_looking", "stage"]]


def test_sweep_p_records_errors(tmp_path):
    # p = 1 is rejected by the model; the sweep carries on
    assert cli.main(["sweep-p", "--out", str(tmp_path), "--p-list", "1,4", *FAST]) == 0
    rows = _rows(tmp_path / "sweep_p.csv")
    assert rows[1][1] == "error" and rows[2][1] == "completed"


def test_sweep_mu(tmp_path):
    argv = ["sweep-mu", "--out", str(tmp_path), "--mu-list", "3", "--escalate", "2", *FAST,
            "--override", "model.nonlinearity=none"]
    assert cli.main(argv) == 0
    rows = _rows(tmp_path / "sweep_mu.csv")
    assert len(rows) == 3 and rows[2][4] == "8.0"


def test_feasibility_cmd(tmp_path):
    assert cli.main(["feasibility", "--out", str(tmp_path), "--n", "1", "--p", "4"]) == 0
    summary = json.loads((tmp_path / "feasibility.json").read_text())
    assert -2.5 <= summary["slope"] <= -1.5
    assert _rows(tmp_path / "feasibility.csv")[0] == ["eps", "delta", "delta1", "delta2", "delta3", "nu", "mu0"]


def test_convergence_cmd(tmp_path):
    assert cli.main(["convergence", "--out", str(tmp_path), "--nrs", "40,80,160"]) == 0
    summary = json.loads((tmp_path / "convergence.json").read_text())
    assert all(1.9 <= o <= 2.1 for o in summary["orders"])


def test_testfn_cmd(tmp_path):
    argv = ["testfn", "--out", str(tmp_path), "--R-list", "4,8", "--override", "horizon=8",
            "--override", "data.amplitude=0.1", "--override", "grid.dr=0.02"]
    assert cli.main(argv) == 0
    rows = _rows(tmp_path / "testfn.csv")
    assert len(rows) == 3
    assert all(float(r[7]) < 0.05 for r in rows[1:])


def test_diffusion_cmd(tmp_path):
    argv = ["diffusion", "--out", str(tmp_path), "--times", "2,4", "--override", "model.nonlinearity=none",
            "--override", "model.mu=5", "--override", "grid.dr=0.05"]
    assert cli.main(argv) == 0
    rows = _rows(tmp_path / "diffusion.csv")
    assert len(rows) == 3 and all(float(r[1]) > 0 for r in rows[1:])


def test_sweep_mu_records_errors(tmp_path):
    argv = ["sweep-mu", "--out", str(tmp_path), "--mu-list=-1,3", *FAST, "--override", "model.nonlinearity=none"]
    assert cli.main(argv) == 0
    rows = _rows(tmp_path / "sweep_mu.csv")
    assert rows[1][0] == "-1.0" and rows[1][5] == "error" and rows[2][5] == "completed"
