import subprocess
import sys

import pytest

from hmmnmf import fixtures
from hmmnmf.cli import run
from hmmnmf.model import HmmModel, format_model, read_model, validate, write_model
from hmmnmf.stats import read_observations


@pytest.fixture
def even_obs(tmp_path):
    path = tmp_path / "even.obs"
    assert run(["simulate", "--model", "even", "--length", "1000", "--seed", "0",
                "--out", str(path)]) == 0
    return path


def test_simulate_file_format(even_obs):
    text = even_obs.read_text().split()
    assert text[:2] == ["M", "2"]
    assert len(text) == 1002
    assert len(read_observations(even_obs)) == 1000


def test_simulate_from_model_file(tmp_path, capsys):
    path = tmp_path / "m.hmm"
    write_model(fixtures.even_process(), path)
    assert run(["simulate", "--model", str(path), "--length", "10"]) == 0
    assert capsys.readouterr().out.split()[:2] == ["M", "2"]


def test_learn_and_eval(even_obs, tmp_path, capsys):
    model_path = tmp_path / "learned.hmm"
    assert run(["learn", "--in", str(even_obs), "--p", "2", "--s", "3", "--order", "auto",
                "--out", str(model_path)]) == 0
    err = capsys.readouterr().err
    assert "order=2" in err and "iter=1 div=" in err
    learned = read_model(model_path)
    validate(learned)
    assert learned.num_states == 2

    tsv = tmp_path / "curve.tsv"
    assert run(["eval", "--true", "even", "--learned", str(model_path), "--nmax", "10",
                "--out", str(tsv)]) == 0
    rows = [line.split("\t") for line in tsv.read_text().splitlines()]
    assert [int(n) for n, _ in rows] == list(range(1, 11))
    assert all(float(r) < 1e-2 for _, r in rows)


def test_learn_is_byte_deterministic(even_obs, tmp_path):
    outs = []
    for name in ("a.hmm", "b.hmm"):
        path = tmp_path / name
        assert run(["--seed", "7", "learn", "--in", str(even_obs), "--p", "2", "--s", "3",
                    "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_model_file_round_trip(tmp_path, capsys):
    path = tmp_path / "lam2.hmm"
    write_model(fixtures.dhmm_equivalent(), path)
    assert run(["eval", "--true", "dhmm-equivalent", "--learned", str(path), "--nmax", "6"]) == 0
    rates = [float(line.split("\t")[1]) for line in capsys.readouterr().out.splitlines()]
    assert max(abs(r) for r in rates) < 1e-14


def test_order_output(even_obs, capsys):
    assert run(["order", "--in", str(even_obs), "--p", "2", "--s", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "N 2"
    values = [float(x) for x in lines[:-1]]
    assert values == sorted(values, reverse=True)


def test_stats_output(tmp_path, capsys):
    obs = tmp_path / "tiny.obs"
    obs.write_text("M 2\n0 1 1 0 1 1\n")
    assert run(["stats", "--in", str(obs), "--p", "1", "--s", "2"]) == 0
    assert capsys.readouterr().out.splitlines() == ["0 11 2 1", "1 01 1 0.5", "1 10 1 0.5"]


def test_check_prank(capsys):
    assert run(["check-prank"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7 and "FAIL" not in out


def _one_error_line(capsys, kind):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    assert err[0].startswith(f"error={kind} message=")


def test_symbol_out_of_range(tmp_path, capsys):
    obs = tmp_path / "bad.obs"
    obs.write_text("M 2\n0 1 2 1\n")
    assert run(["stats", "--in", str(obs), "--p", "1", "--s", "1"]) == 1
    _one_error_line(capsys, "SymbolOutOfRange")


def test_sequence_too_short(tmp_path, capsys):
    obs = tmp_path / "short.obs"
    obs.write_text("M 2\n0 1\n")
    assert run(["learn", "--in", str(obs), "--p", "2", "--s", "3"]) == 1
    _one_error_line(capsys, "SequenceTooShort")


def test_missing_file(capsys):
    assert run(["stats", "--in", "/nonexistent/x.obs", "--p", "1", "--s", "1"]) == 1
    _one_error_line(capsys, "FileNotFoundError")


def test_usage_error(capsys):
    assert run(["learn", "--p", "2"]) == 1
    _one_error_line(capsys, "UsageError")


def test_bad_order_argument(even_obs, capsys):
    assert run(["learn", "--in", str(even_obs), "--p", "2", "--s", "3", "--order", "0"]) == 1
    _one_error_line(capsys, "UsageError")


def test_non_ergodic_exit_code(tmp_path, capsys):
    path = tmp_path / "split.hmm"
    # two closed classes
    path.write_text(format_model(HmmModel.from_matrices([[[0.5, 0], [0, 0.5]], [[0.5, 0], [0, 0.5]]])))
    assert run(["eval", "--true", str(path), "--learned", str(path), "--nmax", "2"]) == 2
    _one_error_line(capsys, "NonErgodic")


def test_help():
    assert run(["--help"]) == 0


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hmmnmf.cli", "simulate", "--model", "even",
                           "--length", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.split()[:2] == ["M", "2"]
