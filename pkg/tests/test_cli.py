import io
import json
import subprocess
import sys

import numpy as np
import pytest

from expcopula import cli
from expcopula import copula as cop
from expcopula import brd
from expcopula.dependence import spearman_rho_closed


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


class TestExitCodes:
    def test_validate_infeasible(self, capsys):
        code, rep = report(capsys, "validate", "--alpha", "3.8", "--delta", "0.06")
        assert code == cli.EXIT_INVALID
        assert rep["results"]["feasible"] is False
        assert round(rep["results"]["delta_star"], 4) == 0.0535

    def test_validate_feasible(self, capsys):
        code, rep = report(capsys, "validate", "--alpha", "2", "--delta", "0.25")
        assert code == 0 and rep["results"]["feasible"] is True

    def test_bad_flag(self, capsys):
        code, out, err = run(capsys, "eval", "--bogus")
        assert code == 2 and "usage" in err and out == ""

    def test_missing_flag(self, capsys):
        assert run(capsys, "measures", "--alpha", "1")[0] == 2

    def test_infeasible_eval(self, capsys):
        code, out, err = run(capsys, "eval", "--alpha", "1", "--delta", "2", "--u", "0.5", "--v", "0.5")
        assert code == 2 and "infeasible" in err

    def test_missing_file(self, capsys, tmp_path):
        code, out, err = run(capsys, "ks", "--input", str(tmp_path / "missing.csv"))
        assert code == cli.EXIT_IO and out == ""

    def test_bad_data(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n2,3\n-3,4\n4,5\n5,6\n6,7\n")
        code, out, err = run(capsys, "ks", "--input", str(path))
        assert code == 2 and "row 3" in err
        code, rep = report(capsys, "ks", "--input", str(path), "--lenient")
        assert code == 0 and rep["results"]["rows_skipped"] == 1

    def test_nonconvergence(self, capsys, tmp_path, monkeypatch):
        path = tmp_path / "d.csv"
        np.savetxt(path, brd.sample_brd(brd.BrdParams(1, 1, 1, 0.5), 50, 0), delimiter=",")
        monkeypatch.setattr(cli.inf, "MAX_EVALUATIONS", 20)
        code, out, err = run(capsys, "fit", "--input", str(path), "--restarts", "1")
        assert code == cli.EXIT_NONCONVERGENCE and "converge" in err


class TestCommands:
    def test_measures_zero(self, capsys):
        code, rep = report(capsys, "measures", "--alpha", "0", "--delta", "0")
        assert code == 0
        assert all(v == 0 for k, v in rep["results"]["closed_form"].items() if k != "method")

    def test_measures_oracle(self, capsys):
        code, rep = report(capsys, "measures", "--alpha", "2", "--delta", "0.125", "--oracle")
        assert code == 0
        assert all(abs(v) < 1e-8 for v in rep["results"]["difference"].values())

    def test_table1(self, capsys):
        code, rep = report(capsys, "table1")
        rows = rep["results"]["rows"]
        assert code == 0 and len(rows) == 28
        assert rep["results"]["columns"] == ["alpha", "delta_upper", "rho_upper", "gamma_upper"]

    def test_table1_pretty(self, capsys):
        code, out, _ = run(capsys, "--pretty", "table1", "--alpha-list", "2")
        assert code == 0 and '"rho_upper": 0.506' in out and '"gamma_upper": 0.4174' in out
        assert run(capsys, "table1", "--alpha-list", "2", "--pretty")[1] == out

    def test_table1_ranges(self, capsys):
        code, rep = report(capsys, "table1", "--alpha-list", "1", "--with-ranges")
        assert code == 0 and len(rep["results"]["range_comparison"]) >= 2

    def test_eval(self, capsys):
        code, rep = report(capsys, "eval", "--alpha", "2", "--delta", "0.25", "--u", "0.3", "--v", "0.6")
        p = cop.CopulaParams(2.0, 0.25)
        assert rep["results"]["cdf"] == cop.cdf(p, 0.3, 0.6)
        assert rep["results"]["pdf"] == cop.pdf(p, 0.3, 0.6)

    def test_eval_out_of_range(self, capsys):
        assert run(capsys, "eval", "--alpha", "2", "--delta", "0.25", "--u", "1.3", "--v", "0.6")[0] == 2

    def test_properties(self, capsys):
        code, rep = report(capsys, "properties", "--alpha", "1.5", "--delta", "0.2", "--grid", "41")
        res = rep["results"]
        assert code == 0 and res["quadrant"]["verdict"] == "PQD" and res["tp2"]["is_tp2"]

    def test_sample_copula(self, capsys):
        code, out, _ = run(capsys, "sample", "--alpha", "2", "--delta", "0.2", "--n", "10", "--seed", "3")
        arr = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
        assert code == 0 and arr.shape == (10, 2)
        assert np.array_equal(arr, cop.sample(cop.CopulaParams(2, 0.2), 10, 3))

    def test_sample_needs_both_scales(self, capsys):
        assert run(capsys, "sample", "--alpha", "2", "--delta", "0.2", "--n", "5", "--lambda1", "1")[0] == 2

    def test_grid(self, capsys):
        code, out, _ = run(capsys, "grid", "--alpha", "2", "--delta", "0.2", "--points", "5")
        arr = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
        assert code == 0 and arr.shape == (25, 4)
        code, out, _ = run(capsys, "grid", "--alpha", "2", "--delta", "0.2", "--points", "4", "--lambda1", "1", "--lambda2", "2")
        assert code == 0 and out.startswith("x,y,cdf,pdf\n")

    def test_timing_flag(self, capsys):
        _, rep = report(capsys, "--timing", "validate", "--alpha", "1", "--delta", "0")
        assert rep["wall_time_s"] >= 0
        _, rep = report(capsys, "validate", "--alpha", "1", "--delta", "0")
        assert "wall_time_s" not in rep


class TestPipeline:
    def test_sample_into_fit(self, capsys, tmp_path):
        truth = ["--alpha", "0.287", "--delta", "10.398", "--lambda1", "33.4", "--lambda2", "28.1"]
        code, out, _ = run(capsys, "sample", *truth, "--n", "2000", "--seed", "12")
        path = tmp_path / "s.csv"
        path.write_text(out)
        code, rep = report(capsys, "fit", "--input", str(path), "--seed", "1")
        assert code == 0
        fit = rep["results"]["fit"]
        assert abs(fit["params"]["lambda1"] / 33.4 - 1) < 0.05
        assert abs(fit["params"]["lambda2"] / 28.1 - 1) < 0.05
        assert abs(fit["spearman_rho"] - spearman_rho_closed(cop.CopulaParams(0.287, 10.398))) < 0.05
        assert rep["seed"] == 1
        models = rep["results"]["comparison"]["models"]
        assert all(m["source"] == "published" for m in models.values())

    def test_byte_reproducible(self, tmp_path):
        path = tmp_path / "s.csv"
        cmd = [sys.executable, "-m", "expcopula"]
        sample = subprocess.run(cmd + ["sample", "--alpha", "-2", "--delta", "-0.2", "--lambda1", "3",
                                       "--lambda2", "4", "--n", "300", "--seed", "9"],
                                capture_output=True, check=True)
        path.write_bytes(sample.stdout)
        outs = [subprocess.run(cmd + ["fit", "--input", str(path), "--restarts", "2"], capture_output=True)
                for _ in range(2)]
        assert outs[0].returncode == 0
        assert outs[0].stdout == outs[1].stdout
