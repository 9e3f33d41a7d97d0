import json
import subprocess
import sys

import pytest

from noisygrover.cli import ConfigError, ResultTable, emit, load_config, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    meta, columns, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, value = line[2:].split("=", 1)
            meta[key] = value
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, columns, rows


def test_ideal_csv(capsys):
    code, out, err = run_cli(capsys, "ideal", "--n", "3", "--steps", "4")
    assert code == 0 and err == ""
    meta, columns, rows = parse_csv(out)
    assert meta["command"] == "ideal"
    assert meta["optimal_iterations"] == "2"
    assert columns == ["t", "P"]
    assert len(rows) == 5
    assert float(rows[0][1]) == pytest.approx(0.125)
    assert float(rows[2][1]) == pytest.approx(0.9453125, abs=1e-12)


def test_noisy_grid_columns_and_position_independence(capsys):
    code, out, _ = run_cli(
        capsys, "noisy", "--n", "3", "--noise", "x",
        "--m", "1,3", "--p", "0.5", "--mu", "0,0.9", "--steps", "6",
    )
    assert code == 0
    meta, columns, rows = parse_csv(out)
    assert len(columns) == 5  # t + 2 m-values x 2 mu-values
    assert columns[1] == "P[m=1;p=0.5;mu=0]"
    for row in rows:
        # bit-flip noise: success series independent of how many qubits are hit
        assert float(row[1]) == pytest.approx(float(row[3]), abs=1e-9)
        assert float(row[2]) == pytest.approx(float(row[4]), abs=1e-9)


def test_noisy_explicit_positions(capsys):
    code, out, _ = run_cli(
        capsys, "noisy", "--n", "3", "--positions", "1,2", "--steps", "3",
    )
    assert code == 0
    _, columns, _ = parse_csv(out)
    assert columns[1].startswith("P[m=2")


def test_json_output_round_trip(capsys):
    code, out, _ = run_cli(
        capsys, "blp", "--n", "2", "--p", "0.5", "--mu", "0,0.9",
        "--steps", "15", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["columns"] == ["p", "mu", "N_backflow"]
    assert payload["meta"]["witness_only"] == "true"
    assert len(payload["rows"]) == 2
    assert payload["rows"][0][1] == 0.0


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\nnoise = y\np = 0.25\nmu = 0.5  # comment\nsteps = 2\n")
    code, out, _ = run_cli(capsys, "noisy", "--config", str(cfg), "--mu", "0.9")
    assert code == 0
    meta, _, rows = parse_csv(out)
    assert meta["mu"] == "0.9"      # flag wins
    assert meta["p"] == "0.25"      # file fills the rest
    assert len(rows) == 3


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\nbogus = 1\n")
    code, _, err = run_cli(capsys, "noisy", "--config", str(cfg))
    assert code == 1
    assert "bogus" in err


def test_load_config_syntax_error(tmp_path):
    cfg = tmp_path / "broken.cfg"
    cfg.write_text("n @@ 3\n")
    with pytest.raises(ConfigError):
        load_config(str(cfg))


@pytest.mark.parametrize(
    "argv",
    [
        ("noisy", "--n", "3", "--p", "1.5"),
        ("noisy", "--n", "3", "--steps", "abc"),
        ("noisy",),                              # n missing
        ("thermal", "--n", "2", "--temps", "0"),  # temperature must be positive
        ("oracle-check", "--n", "2", "--steps", "13"),
        ("nonsense",),
    ],
)
def test_invalid_inputs_exit_one(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")


def test_oracle_check_passes(capsys):
    code, out, _ = run_cli(capsys, "oracle-check", "--n", "2", "--steps", "6")
    assert code == 0
    meta, _, rows = parse_csv(out)
    assert float(meta["max_trace_distance"]) < 1e-10
    assert len(rows) == 7


def test_dilation_check_passes_and_is_reproducible(capsys):
    argv = (
        "dilation-check", "--n", "2", "--p", "0.1,0.5,1",
        "--mu", "0,0.5,1", "--trials", "5",
    )
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    meta, columns, rows = parse_csv(out1)
    assert meta["all_within_tolerance"] == "true"
    assert "m_residual" in columns
    assert len(rows) == 9


def test_invariance_command(capsys):
    code, out, _ = run_cli(
        capsys, "invariance", "--n", "3", "--p", "0.4", "--mu", "0.5", "--steps", "8",
    )
    assert code == 0
    meta, columns, rows = parse_csv(out)
    assert meta["subsets"] == "7"
    assert columns == ["t", "P", "max_dev"]
    assert max(float(row[2]) for row in rows) < 1e-9


def test_firstmax_row_shape(capsys):
    code, out, _ = run_cli(
        capsys, "firstmax", "--n", "3", "--p", "0.2,0.8", "--mu", "0,1",
        "--steps", "20",
    )
    assert code == 0
    _, columns, rows = parse_csv(out)
    assert columns == ["n", "p", "mu", "t_star", "P_star"]
    assert len(rows) == 4
    # memory helps: at fixed p the first peak is at least as high with mu=1
    assert float(rows[1][4]) >= float(rows[0][4])


def test_jobs_do_not_change_output(capsys):
    argv = (
        "noisy", "--n", "2", "--m", "1,2", "--p", "0.2,0.8",
        "--mu", "0,0.5", "--steps", "5",
    )
    code1, out1, _ = run_cli(capsys, *argv, "--jobs", "1")
    code2, out2, _ = run_cli(capsys, *argv, "--jobs", "3")
    assert code1 == code2 == 0
    assert out1 == out2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "series.csv"
    code, out, _ = run_cli(
        capsys, "ideal", "--n", "2", "--steps", "3", "--output", str(target)
    )
    assert code == 0 and out == ""
    data = target.read_bytes()
    assert b"\r" not in data
    assert data.decode().splitlines()[-1].startswith("3,")


def test_emit_rejects_unknown_format(tmp_path):
    table = ResultTable({"command": "x"}, ["a"], [[1.0]])
    with pytest.raises(ConfigError):
        with open(tmp_path / "t.txt", "w") as fh:
            emit(table, "yaml", fh)


def test_console_script_help_and_version():
    for flag in ("--help", "--version"):
        proc = subprocess.run(
            [sys.executable, "-m", "noisygrover.cli", flag],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "noisygrover" in proc.stdout
