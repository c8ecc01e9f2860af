import json
import math

import numpy as np
import pytest

from kmsplit.cli import main, read_trace_csv, write_trace_csv
from kmsplit.config import parse_config_text, parse_descriptor
from kmsplit.errors import ConfigError

SFP_T_ROW = """
# split-feasibility run, t start, constant steps
problem.kind = sfp
problem.start = t
grid.n = 4096
schedules.beta = kind=harmonic-approach limit=1 coeff=1 first=0.25
schedules.lambda = kind=constant value=0.4
schedules.gamma = kind=constant value=0.5
stop.rule = residual
stop.tolerance = 1e-3
"""

RECON_OSCILLATING = """
problem.kind = reconstruction
problem.data = x
problem.start = x^2/10
problem.mode = prox-gradient
grid.n = 512
schedules.beta = kind=harmonic-approach limit=1 coeff=1 first=0.25
schedules.lambda = kind=constant value=0.9
schedules.gamma = kind=oscillating center=1.3 amplitude=0.1
stop.rule = step-norm
stop.tolerance = 1e-4
"""

CONSTANT_BETA = """
problem.kind = sfp
problem.start = t
grid.n = 256
schedulES.beta = kind=constant value=0.5
schedules.lambda = kind=constant value=0.4
schedules.gamma = kind=constant value=0.5
stop.rule = residual
stop.tolerance = 1e-3
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestConfigParsing:
    def test_descriptor_grammar(self):
        seq = parse_descriptor("kind=harmonic-approach limit=1 coeff=0.5")
        assert seq(0) == pytest.approx(0.5)
        seq = parse_descriptor("kind=constant value=0.4 first=0.1")
        assert seq(0) == 0.1 and seq(1) == 0.4
        seq = parse_descriptor("kind=table values=0.1,0.2")
        assert seq(5) == 0.2

    def test_descriptor_errors(self):
        for bad in ("value=0.4", "kind=constant", "kind=constant value=x",
                    "kind=constant value=1 value=2", "kind=poly degree=2",
                    "kind=constant value=1 extra=2"):
            with pytest.raises(ConfigError):
                parse_descriptor(bad)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("problem.kind = sfp\nproblem.qq = zero\n")

    def test_key_invalid_for_problem_kind_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("problem.kind = sfp\nproblem.data = x\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("problem.kind = sfp\nproblem.kind = sfp\n")

    def test_empty_config_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("")

    def test_round_trip(self):
        cfg = parse_config_text(SFP_T_ROW)
        again = parse_config_text(cfg.to_text())
        assert again == cfg

    def test_round_trip_reconstruction_with_sweep(self):
        text = RECON_OSCILLATING + (
            "sweep.starts = x^2/10, sin\n"
            "sweep.gammas = kind=constant value=1.3 | "
            "kind=oscillating center=1.3 amplitude=0.1\n")
        cfg = parse_config_text(text)
        assert parse_config_text(cfg.to_text()) == cfg

    def test_finite_dim_config(self):
        cfg = parse_config_text(
            "problem.kind = custom-finite-dim\n"
            "problem.name = line-projection\n"
            "problem.x0 = 4,3\n"
            "schedules.beta = kind=harmonic-approach limit=1 coeff=1 first=0.25\n"
            "schedules.lambda = kind=constant value=0.9\n"
            "stop.rule = max-iterations\n"
            "stop.max_iterations = 2000\n")
        assert cfg.fd_name == "line-projection"
        assert parse_config_text(cfg.to_text()) == cfg


class TestCmdRun:
    def test_sfp_t_row(self, tmp_path, capsys):
        cfg = write(tmp_path, "run.cfg", SFP_T_ROW)
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        assert code == 0
        out = capsys.readouterr().out
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["termination_reason"] == "residual"
        assert 5 <= summary["iterations"] <= 11
        assert "iterations" in out
        assert (tmp_path / "out" / "trace.csv").exists()

    def test_bad_beta_names_condition_i(self, tmp_path, capsys):
        cfg = write(tmp_path, "bad.cfg", CONSTANT_BETA.replace("schedulES", "schedules"))
        code = main(["run", "--config", cfg])
        assert code == 1
        assert "condition (i)" in capsys.readouterr().err

    def test_forced_oscillating_step_warns_and_runs(self, tmp_path, capsys):
        cfg = write(tmp_path, "osc.cfg", RECON_OSCILLATING)
        with pytest.warns(UserWarning):
            code = main(["run", "--config", cfg, "--force"])
        assert code in (0, 2)

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.cfg")])
        assert code == 1

    def test_grid_override(self, tmp_path):
        cfg = write(tmp_path, "run.cfg", SFP_T_ROW)
        code = main(["run", "--config", cfg, "--grid-n", "512"])
        assert code == 0

    def test_trace_csv_round_trip(self, tmp_path):
        cfg = write(tmp_path, "run.cfg", SFP_T_ROW)
        out = tmp_path / "out"
        assert main(["run", "--config", cfg, "--out", str(out)]) == 0
        data = read_trace_csv(out / "trace.csv")
        summary = json.loads((out / "summary.json").read_text())
        # re-imported columns reproduce the summary statistics exactly
        assert int(data["n"][-1]) == summary["iterations"]
        assert data["step_norm"][-1] == summary["final_step_norm"]
        assert data["fp_residual"][-1] == summary["final_fp_residual"]
        assert data["feasibility_or_objective"][-1] == summary["final_monitor"]
        assert data["iterate_norm"][-1] == summary["final_iterate_norm"]


class TestCmdValidate:
    def test_reference_variable_schedules_all_proved(self, tmp_path, capsys):
        text = SFP_T_ROW.replace(
            "schedules.lambda = kind=constant value=0.4",
            "schedules.lambda = kind=harmonic-approach limit=0.5 coeff=-1 offset=2",
        ).replace(
            "schedules.gamma = kind=constant value=0.5",
            "schedules.gamma = kind=harmonic-approach limit=1 coeff=0.5",
        )
        cfg = write(tmp_path, "var.cfg", text)
        code = main(["validate", "--config", cfg])
        out = capsys.readouterr().out
        assert code == 0
        assert "violated" not in out

    def test_oscillating_step_reports_condition_iii(self, tmp_path, capsys):
        cfg = write(tmp_path, "osc.cfg", RECON_OSCILLATING)
        code = main(["validate", "--config", cfg])
        out = capsys.readouterr().out
        assert code == 1
        assert any("condition (iii)" in line and "violated" in line
                   for line in out.splitlines())

    def test_constant_beta_reports_condition_i(self, tmp_path, capsys):
        cfg = write(tmp_path, "bad.cfg", CONSTANT_BETA.replace("schedulES", "schedules"))
        code = main(["validate", "--config", cfg])
        out = capsys.readouterr().out
        assert code == 1
        assert any("condition (i)" in line and "violated" in line
                   for line in out.splitlines())

    def test_empty_config(self, tmp_path, capsys):
        cfg = write(tmp_path, "empty.cfg", "")
        assert main(["validate", "--config", cfg]) == 1


class TestCmdOracle:
    def test_reconstruction_zero_data(self, tmp_path, capsys):
        text = ("problem.kind = reconstruction\n"
                "problem.data = zero\n"
                "grid.n = 128\n")
        cfg = write(tmp_path, "oracle.cfg", text)
        out = tmp_path / "out"
        code = main(["oracle", "--config", cfg, "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "residual = 0" in printed
        rows = (out / "oracle.csv").read_text().splitlines()
        assert rows[0] == "t,u"
        assert len(rows) == 129
        assert all(float(r.split(",")[1]) == 0.0 for r in rows[1:])

    def test_reconstruction_linear_data(self, tmp_path, capsys):
        text = ("problem.kind = reconstruction\n"
                "problem.data = x\n"
                "grid.n = 256\n")
        cfg = write(tmp_path, "oracle.cfg", text)
        assert main(["oracle", "--config", cfg]) == 0
        printed = capsys.readouterr().out
        residual = float(printed.split("residual = ")[1].splitlines()[0])
        assert residual <= 1e-10

    def test_sfp_oracle_is_zero(self, tmp_path, capsys):
        cfg = write(tmp_path, "oracle.cfg",
                    "problem.kind = sfp\ngrid.n = 128\n")
        assert main(["oracle", "--config", cfg]) == 0
        printed = capsys.readouterr().out
        assert "norm = 0" in printed

    def test_finite_dim_unsupported(self, tmp_path, capsys):
        cfg = write(tmp_path, "oracle.cfg",
                    "problem.kind = custom-finite-dim\n"
                    "problem.name = identity\nproblem.x0 = 1,1\n")
        assert main(["oracle", "--config", cfg]) == 1


class TestCmdSweep:
    def test_two_by_two_sweep(self, tmp_path, capsys):
        text = SFP_T_ROW + (
            "sweep.starts = t, sin\n"
            "sweep.gammas = kind=constant value=0.5 | "
            "kind=harmonic-approach limit=1 coeff=0.5\n")
        cfg = write(tmp_path, "sweep.cfg", text)
        out = tmp_path / "out"
        code = main(["sweep", "--config", cfg, "--out", str(out),
                     "--grid-n", "1024", "--workers", "2"])
        assert code == 0
        rows = (out / "sweep.csv").read_text().splitlines()
        assert len(rows) == 1 + 4
        table = capsys.readouterr().out.splitlines()
        assert len(table) == 4

    def test_single_point_sweep(self, tmp_path, capsys):
        cfg = write(tmp_path, "sweep.cfg", SFP_T_ROW)
        code = main(["sweep", "--config", cfg, "--grid-n", "512"])
        assert code == 0
        assert len(capsys.readouterr().out.splitlines()) == 1

    def test_invalid_schedule_aborts_before_running(self, tmp_path, capsys):
        text = SFP_T_ROW + (
            "sweep.starts = t\n"
            "sweep.gammas = kind=constant value=0.5 | "
            "kind=oscillating center=1.3 amplitude=0.1\n")
        cfg = write(tmp_path, "sweep.cfg", text)
        code = main(["sweep", "--config", cfg, "--grid-n", "256"])
        assert code == 1
        assert "validation failed" in capsys.readouterr().err

    def test_reconstruction_sweep_varies_the_start(self, tmp_path, capsys):
        text = ("problem.kind = reconstruction\n"
                "problem.data = x\n"
                "problem.mode = prox-gradient\n"
                "grid.n = 256\n"
                "schedules.beta = kind=harmonic-approach limit=1 coeff=1 first=0.25\n"
                "schedules.lambda = kind=constant value=0.9\n"
                "stop.rule = step-norm\n"
                "stop.tolerance = 1e-4\n"
                "sweep.starts = x^2/10, 2^x/16, sin, cos\n"
                "sweep.gammas = kind=constant value=1.3\n")
        cfg = write(tmp_path, "rsweep.cfg", text)
        code = main(["sweep", "--config", cfg])
        assert code == 0
        rows = capsys.readouterr().out.splitlines()
        assert [r.split()[0] for r in rows] == ["x^2/10", "2^x/16", "sin", "cos"]

        # the per-row start is what actually seeds the run
        from kmsplit.cli import _run_one
        from kmsplit.config import parse_config
        from kmsplit.hilbert import norm as l2_norm
        from kmsplit.problems import reconstruction_problem
        parsed = parse_config(cfg)
        problem = reconstruction_problem("x", n=256)
        for name in ("sin", "cos"):
            trace = _run_one(parsed, start=name,
                             gamma=parsed.sweep_gammas[0])
            assert trace.iterate_norm[0] == pytest.approx(
                l2_norm(problem.start(name)))

    def test_variable_step_column_dominates_constant_column(self, tmp_path, capsys):
        text = SFP_T_ROW + (
            "sweep.starts = t, t^2, t^3, sin, cos, exp, log, sqrt\n"
            "sweep.gammas = kind=constant value=0.5 | "
            "kind=harmonic-approach limit=1 coeff=0.5\n")
        cfg = write(tmp_path, "sweep.cfg", text)
        out = tmp_path / "out"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        import csv as csvmod
        with open(out / "sweep.csv", newline="") as fh:
            rows = list(csvmod.DictReader(fh))
        by_start = {}
        for r in rows:
            by_start.setdefault(r["start"], {})[r["gamma"]] = int(r["iterations"])
        assert len(by_start) == 8
        for start, cells in by_start.items():
            const = cells["kind=constant value=0.5"]
            var = cells["kind=harmonic-approach limit=1 coeff=0.5"]
            assert var <= const, (start, var, const)

    def test_deterministic_row_order_with_workers(self, tmp_path, capsys):
        text = SFP_T_ROW + (
            "sweep.starts = t, t^2, sin\n")
        cfg = write(tmp_path, "sweep.cfg", text)
        orders = []
        for workers in ("1", "3"):
            assert main(["sweep", "--config", cfg, "--grid-n", "512",
                         "--workers", workers]) == 0
            rows = capsys.readouterr().out.splitlines()
            orders.append([r.split()[0] for r in rows])
        assert orders[0] == orders[1] == ["t", "t^2", "sin"]


class TestTraceCsvFormat:
    def test_seventeen_digit_round_trip(self, tmp_path):
        from kmsplit.problems import reference_sfp_schedules, run_sfp, sfp_problem
        from kmsplit.iteration import residual_rule
        problem = sfp_problem("t", n=256)
        trace = run_sfp(problem, reference_sfp_schedules(), residual_rule(1e-3))
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        data = read_trace_csv(path)
        np.testing.assert_array_equal(data["iterate_norm"], trace.iterate_norm)
        np.testing.assert_array_equal(data["beta_n"], trace.beta)
        np.testing.assert_array_equal(
            data["feasibility_or_objective"], trace.monitor)
        # nan in the first step-norm cell survives the round trip
        assert math.isnan(data["step_norm"][0])
