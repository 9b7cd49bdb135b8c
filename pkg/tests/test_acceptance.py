"""Release acceptance criteria, one test each.

Each test prints a single ``PASS``/``FAIL`` line with the measured values;
``pytest -s tests/test_acceptance.py`` or ``hsecant verify`` shows them.
"""
import subprocess
import sys

import pytest

from hsecant import acceptance

RESULTS = {}


def _check(number, capsys, threads=1):
    res = acceptance.run_criterion(number, threads=threads)
    RESULTS[number] = res
    with capsys.disabled():
        print(f"\n{res.line()}\n  {res.timing()}")
    assert res.passed, res.line()
    return res


@pytest.mark.parametrize("number", [1, 2, 3, 4, 5, 6, 7, 8])
def test_criterion(number, capsys):
    _check(number, capsys)


def test_criterion_9_determinism(capsys):
    _check(9, capsys, threads=4)


@pytest.mark.slow
def test_verify_command_reproduces_report(tmp_path):
    """The CLI suite with four threads prints the same lines as the in-process run."""
    if len(RESULTS) != len(acceptance.CRITERIA):
        pytest.skip("needs the per-criterion tests in the same session")
    out = tmp_path / "verify.txt"
    proc = subprocess.run([sys.executable, "-m", "hsecant", "verify", "--threads", "4", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    expected = [RESULTS[n].line() for n, _, _ in acceptance.CRITERIA]
    assert out.read_text().splitlines() == expected
