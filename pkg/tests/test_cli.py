import json
import subprocess
import sys

import pytest

from phase_srm.cli import main
from phase_srm.report import load_report


@pytest.fixture
def spec_file(tmp_path):
    def make(**doc):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc))
        return path

    return make


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (load_report(out) if out else None)


@pytest.mark.parametrize(
    "amps, N, expected",
    [([1, 1], 2, 0.8535533906), ([1, 0], 5, 1.0), ([1, 1, 1], 1, 0.7037037037)],
)
def test_score(capsys, spec_file, amps, N, expected):
    code, rep = run(capsys, "score", "--spec", spec_file(amplitudes=amps, copies=N))
    assert code == 0
    assert rep["derived"]["max_average_score"] == pytest.approx(expected, abs=1e-10)
    assert rep["derived"]["abs_difference"] < 1e-10


def test_certify_plain(capsys, spec_file):
    code, rep = run(capsys, "certify", "--spec", spec_file(amplitudes=[0.3, 0.9], copies=3))
    assert code == 0
    assert rep["certification"]["verdict"] == "GlobalMaximum"


def test_certify_reciprocal_qubit(capsys, spec_file):
    path = spec_file(amplitudes=[1, 1], copies=2)
    code, rep = run(capsys, "certify", "--spec", path, "--strategy", "reciprocal")
    assert code == 0
    assert rep["certification"]["verdict"] == "GlobalMinimum"


def test_certify_reciprocal_qutrit_reports_without_asserting(capsys, spec_file):
    path = spec_file(amplitudes=[1, 1, 1], copies=2)
    code, rep = run(capsys, "certify", "--spec", path, "--strategy", "reciprocal")
    assert code == 0
    assert rep["certification"]["expected_verdict"] is None
    assert rep["certification"]["verdict"] in ("MixedSign", "Extremal", "GlobalMinimum")


def test_certify_verdict_mismatch(capsys, spec_file):
    # too few sample points: the SRM is no longer a stationary point
    path = spec_file(amplitudes=[0.4, 0.7, 0.6], copies=3, sample_points=3)
    code, rep = run(capsys, "certify", "--spec", path)
    assert code == 4
    assert rep["certification"]["verdict"] != "GlobalMaximum"


def test_certify_zero_amplitude_exit_3(capsys, spec_file):
    code, _ = run(capsys, "certify", "--spec", spec_file(amplitudes=[1, 0], copies=2), "--strategy", "reciprocal")
    assert code == 3


def test_simulate(capsys, spec_file):
    path = spec_file(amplitudes=[1, 1], copies=1, trials=200_000, seed=7)
    code, rep = run(capsys, "simulate", "--spec", path)
    assert code == 0
    sim = rep["simulation"]
    assert abs(sim["mean_score"] - 0.75) < 4 * sim["std_error"]
    code2, rep2 = run(capsys, "simulate", "--spec", path)
    assert rep2 == rep


def test_simulate_single_trial_deterministic(capsys, spec_file):
    path = spec_file(amplitudes=[1, 1], copies=1, trials=1, seed=5)
    _, a = run(capsys, "simulate", "--spec", path)
    _, b = run(capsys, "simulate", "--spec", path)
    assert a == b and "record" in a["simulation"]


def test_simulate_single_mode(capsys, spec_file):
    _, rep = run(capsys, "simulate", "--spec", spec_file(amplitudes=[1, 0], copies=3, trials=1000))
    assert rep["simulation"]["mean_score"] == 1.0


def test_simulate_needs_trials(capsys, spec_file):
    code, _ = run(capsys, "simulate", "--spec", spec_file(amplitudes=[1, 1], copies=1))
    assert code == 3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_circuit(capsys, spec_file, n):
    code, rep = run(capsys, "circuit", "--spec", spec_file(amplitudes=[1, 1], copies=2), "--n", n)
    assert code == 0
    c = rep["circuit"]
    assert c["max_pom_deviation"] < 1e-10
    assert c["score_abs_difference"] < 1e-10
    assert all(v < 1e-12 for v in c["unitarity_deviation"].values())
    assert c["listings"]["basis_transform"].startswith(f"qubits {n}")


@pytest.mark.parametrize(
    "doc, extra",
    [
        ({"amplitudes": [1, 1], "copies": 2}, ["--n", "5"]),
        ({"amplitudes": [1, [0, 1]], "copies": 2}, []),
        ({"amplitudes": [1, 1, 1], "copies": 2}, []),
    ],
)
def test_circuit_validation_exit_3(capsys, spec_file, doc, extra):
    code, _ = run(capsys, "circuit", "--spec", spec_file(**doc), *extra)
    assert code == 3


def test_parse_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["score", "--spec", str(bad)]) == 2
    assert main(["score", "--spec", str(tmp_path / "missing.json")]) == 2


def test_out_file_and_module_entry(tmp_path, spec_file):
    path = spec_file(amplitudes=[1, 1], copies=1)
    out = tmp_path / "report.json"
    proc = subprocess.run(
        [sys.executable, "-m", "phase_srm", "score", "--spec", str(path), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == ""
    assert load_report(out.read_text())["derived"]["max_average_score"] == pytest.approx(0.75, abs=1e-12)
