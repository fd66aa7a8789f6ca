import json

from splitrates.cli import main


class TestRatesCommand:
    def test_optimal_table(self, capsys):
        code = main(["rates", "--alpha", "1", "--beta", "1", "--rho", "0.3",
                     "--algo", "prs", "--optimal"])
        out = capsys.readouterr().out
        assert code == 0
        assert "1.82574" in out
        assert "0.540575" in out

    def test_csv_output(self, capsys):
        code = main(["rates", "--alpha", "1", "--beta", "1", "--rho", "0.3",
                     "--setting", "optimization", "--algo", "ea,prs",
                     "--tau", "0.5", "--csv"])
        out = capsys.readouterr().out.splitlines()
        assert code == 0
        assert out[0] == "algorithm,setting,tau,rate"
        assert out[1].startswith("ea,optimization,0.5,0.85")

    def test_domain_error_exit_code(self, capsys):
        code = main(["rates", "--alpha", "1", "--beta", "1", "--rho", "0.3",
                     "--algo", "ea", "--tau", "99"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_infinite_beta(self, capsys):
        code = main(["rates", "--alpha", "1", "--beta", "inf", "--rho", "0.5",
                     "--algo", "fbs_grad_f", "--optimal"])
        assert code == 0


class TestRegionsCommand:
    def test_single_point(self, capsys):
        code = main(["regions", "--beta", "0.1", "--rho", "0.0022"])
        assert code == 0
        assert capsys.readouterr().out.strip().startswith("prs")

    def test_grid_outputs(self, tmp_path, capsys):
        csv = tmp_path / "map.csv"
        svg = tmp_path / "map.svg"
        code = main(["regions", "--grid", "6", "--out-csv", str(csv),
                     "--out-svg", str(svg)])
        assert code == 0
        assert csv.exists() and svg.exists()
        assert len(csv.read_text().splitlines()) == 1 + 36


class TestExperimentCommands:
    def test_denoise_with_config_and_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 32, "chi": 0.7, "mu": 1e-3, "max_iter": 10}))
        out = tmp_path / "run"
        code = main(["denoise", "--config", str(cfg), "--out", str(out), "--seed", "1"])
        assert code == 0
        params = json.loads((out / "params.json").read_text())
        assert params["config"]["seed"] == 1
        assert (out / "errors.svg").exists()

    def test_missing_config_exits_one(self, capsys):
        code = main(["denoise", "--config", "/nonexistent/cfg.json"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_restore_small(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["restore", "--n-pixels", "32", "--m-rows", "39",
                     "--chi", "10", "--max-iter", "10", "--out", str(out)])
        assert code == 0
        assert (out / "params.json").exists()

    def test_invalid_config_value_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 2}))
        assert main(["denoise", "--config", str(cfg)]) == 1


class TestVerifyCommand:
    def test_small_suite_passes(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["verify", "--cases", "10", "--pairs", "100", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert not report["contraction_fuzz"]["violated"]
        assert len(report["example1"]) == 5


class TestSweepCommand:
    def test_csv_and_svg(self, tmp_path, capsys):
        csv = tmp_path / "sweep.csv"
        svg = tmp_path / "sweep.svg"
        code = main(["sweep", "--alpha", "1", "--beta", "1", "--rho", "0.3",
                     "--out-csv", str(csv), "--out-svg", str(svg)])
        assert code == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == "algorithm,tau,rate"
        assert any(line.startswith("drs,") for line in lines)
        assert svg.read_text().count("<polyline") >= 5
