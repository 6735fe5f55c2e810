"""Test the command-line front end."""

import pytest

from gme_cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from scan_report import read_csv

FAST = ["--restarts", "4", "--seed", "2"]


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["gme", "--family", "omega", "--x", "0", "--y", "1", "--d", "3"], "0.166666666667"),
        (["gme", "--family", "tau", "--p", "1,0,0"], "0.5"),
        (["gme", "--family", "omega", "--x", "0.2", "--y", "0.3", "--mode", "real"], "0.193333333333"),
        (["gme", "--state", "pi-minus"], "0.166666666667"),
        (["gme", "--state", "werner:1"], "0.166666666667"),
        (["gme", "--state", "real-example", "--mode", "real"], "0.3125"),
    ],
)
def test_gme_command(capsys, argv, expected):
    """Analytic and numeric values agree and are printed."""
    assert main(argv + FAST) == EXIT_OK
    out = capsys.readouterr().out
    assert f"Analytic:    {expected}" in out
    assert "Numeric:" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["gme", "--family", "omega", "--x", "0.8", "--y", "0.5"],
        ["gme", "--state", "nonsense"],
        ["gme", "--family", "tau", "--p", "0.5,0.2,0.1"],
        ["gme", "--family", "omega"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    """Invalid parameters exit with code 2 and a message."""
    assert main(argv) == EXIT_INVALID
    assert "Error:" in capsys.readouterr().err


def test_crossover_command(capsys, tmp_path):
    """The crossover table starts at 12/13."""
    out_path = tmp_path / "crossover.csv"
    assert main(["crossover", "--d-min", "3", "--d-max", "6", "-o", str(out_path)]) == EXIT_OK
    assert "0.923076923077" in capsys.readouterr().out
    lines = out_path.read_text().splitlines()
    assert lines[0] == "d,y_bisection,y_closed_form,residual"
    assert len(lines) == 5


def test_channel_purity_command(capsys):
    """pi-minus / 3 as a Choi operator gives 1/6."""
    assert main(["channel-purity", "--channel", "pi-minus"] + FAST) == EXIT_OK
    assert "0.166666666667" in capsys.readouterr().out


def test_scan_and_verify(capsys, tmp_path):
    """A coarse scan writes a CSV that the verify command accepts."""
    path = tmp_path / "tau.csv"
    argv = ["scan", "--family", "tau", "--step", "0.5", "--workers", "1", "-o", str(path)] + FAST
    assert main(argv) == EXIT_OK
    assert "6 points" in capsys.readouterr().out
    manifest, rows = read_csv(path)
    assert len(rows) == 6
    assert manifest["truncated"] == "False"
    assert "scan" in manifest["command"]
    assert main(["verify", str(path)]) == EXIT_OK
    assert "VALID" in capsys.readouterr().out


def test_scan_json(tmp_path):
    """JSON output verifies with witnesses."""
    path = tmp_path / "omega.json"
    argv = ["scan", "--family", "omega", "--step", "0.5", "--format", "json", "-o", str(path)] + FAST
    assert main(argv) == EXIT_OK
    assert main(["verify", str(path)]) == EXIT_OK


def test_verify_missing_report(capsys, tmp_path):
    """Verifying a missing file fails."""
    assert main(["verify", str(tmp_path / "none.csv")]) == EXIT_FAILED


def test_line_command(capsys):
    """The biased tau line prints one row per p."""
    assert main(["line", "--p", "0.5,0.6"] + FAST) == EXIT_OK
    out = capsys.readouterr().out
    assert "0.5000" in out and "0.6000" in out


@pytest.mark.slow
def test_check_separable_command(capsys):
    """The separable harness passes and reports the real counterexample."""
    assert main(["check-separable", "--trials", "3", "--restarts", "16", "--seed", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "VIOLATION" in out
