import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from hsecant.cli import fmt, main

REPORT_KEYS = {"scenario", "params", "n", "ks_statistic", "threshold", "passed", "mean", "variance", "seed"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(0.5) == "0.5"
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333333333"


def test_dist_pdf_golden(capsys):
    assert run(capsys, "dist", "hs", "pdf", "--loc", "0", "--scale", "1", "--x", "0") == (0, "0.5\n", "")
    code, out, _ = run(capsys, "dist", "hs-sum", "pdf", "--n", "2", "--scale", "3.14159265358979", "--x", "0")
    assert out == "0.101321183642338\n"


def test_dist_multiple_points_csv(capsys):
    code, out, _ = run(capsys, "dist", "hs", "cdf", "--x", "-1", "0", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "cdf"]
    assert rows[2] == ["0", "0.5"]
    assert float(rows[1][1]) + float(rows[3][1]) == pytest.approx(1.0)


def test_dist_quantile(capsys):
    code, out, _ = run(capsys, "dist", "hs", "quantile", "--p", "0.75")
    assert float(out) == pytest.approx(0.5610998523391801, rel=1e-14)


def test_dist_sample_reproducible(capsys):
    argv = ["dist", "hs-sum", "sample", "--n", "3", "--count", "5", "--seed", "42"]
    _, first, _ = run(capsys, *argv)
    _, again, _ = run(capsys, *argv)
    assert first == again
    assert first.splitlines()[0] == "value" and len(first.splitlines()) == 6


def test_dist_missing_argument(capsys):
    code, _, err = run(capsys, "dist", "hs", "pdf")
    assert code == 2 and "needs --x" in err


def test_figure1(capsys):
    code, out, _ = run(capsys, "figure1")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["y", "hs", "normal", "logistic"]
    assert len(rows) == 802
    data = np.array(rows[1:], dtype=float)
    mid = data[np.argmin(np.abs(data[:, 0]))]
    np.testing.assert_allclose(mid, [0.0, 0.5, 0.398942280401433, 0.453449841058554], rtol=1e-14)
    # Riemann sums over [-4, 4] with step 0.01
    sums = data[:, 1:].sum(axis=0) * 0.01
    assert np.all((sums > 0.99) & (sums < 1.001))


def test_figure1_bad_grid(capsys):
    assert run(capsys, "figure1", "--lo", "1", "--hi", "0")[0] == 2


def test_twin_report(capsys, tmp_path):
    samples = tmp_path / "v.csv"
    code, out, _ = run(capsys, "twin", "--rho", "0.5", "--reps", "20000", "--seed", "7",
                       "--samples-out", str(samples))
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert set(rep) == REPORT_KEYS
    assert rep["scenario"] == "twin" and rep["seed"] == 7 and rep["n"] == 20000
    assert rep["params"]["target_scale"] == pytest.approx(1.5707963267949)
    assert len(samples.read_text().splitlines()) == 20001


def test_twin_invalid_rho(capsys):
    code, out, err = run(capsys, "twin", "--rho", "1")
    assert code == 2 and out == "" and "rho" in err


def test_bad_alpha_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["twin", "--alpha", "0.1"])
    assert exc.value.code == 2


def test_jeffreys_both(capsys):
    code, out, _ = run(capsys, "jeffreys", "--mode", "both", "--reps", "20000", "--seed", "3")
    reps = json.loads(out)
    assert code == 0
    assert [r["scenario"] for r in reps] == ["jeffreys-multinomial", "jeffreys-binomial", "jeffreys-two-sample"]
    assert all(set(r) == REPORT_KEYS for r in reps)


def test_iv_report(capsys):
    code, out, _ = run(capsys, "iv", "--rho-yd", "0", "--sigma-y", "1", "--p-d", "0.5",
                       "--n", "2000", "--reps", "20000", "--seed", "11")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    # eta = sigma_y / sigma_d = 2 for a balanced binary D
    assert rep["params"]["target_location"] == pytest.approx(0.693147180559945)
    assert rep["threshold"] == 0.02


def test_iv_check_failure_exit_code(capsys):
    code, out, _ = run(capsys, "iv", "--n", "500", "--reps", "500", "--ks-tol", "1e-6")
    assert code == 1 and json.loads(out)["passed"] is False


def test_iv_inconsistent_sigma_d(capsys):
    code, out, err = run(capsys, "iv", "--p-d", "0.5", "--sigma-d", "0.3")
    assert code == 2 and out == ""
    assert err.count("\n") == 1 and "inconsistent" in err


def test_out_file(capsys, tmp_path):
    path = tmp_path / "q.txt"
    code, out, _ = run(capsys, "dist", "hs", "quantile", "--p", "0.5", "--out", str(path))
    assert out == "" and path.read_text() == "0\n"


def test_module_entry_point_byte_identical():
    argv = [sys.executable, "-m", "hsecant", "iv", "--n", "300", "--reps", "300", "--seed", "5",
            "--threads", "2"]
    first = subprocess.run(argv, capture_output=True)
    again = subprocess.run(argv, capture_output=True)
    assert first.returncode == again.returncode in (0, 1)
    assert first.stdout == again.stdout and b'"scenario": "iv"' in first.stdout
