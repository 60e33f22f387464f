import json
import math
import subprocess
import sys

import numpy as np
import pytest

from entmeasure import loads_state
from entmeasure.cli import main


def run_cli(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_measure_bell_from_ket(capsys):
    status, out, _ = run_cli(
        capsys, "measure", "--ket", "(|+-> - |-+>)/sqrt(2)", "--split", "0", "--format", "json"
    )
    assert status == 0
    document = json.loads(out)
    assert document["mode"] == "bipartite"
    assert abs(document["j"] - 0.5) < 1e-10
    assert abs(document["k"] - 0.7071067811865476) < 1e-12
    assert abs(document["lambda"] - 0.5) < 1e-10
    assert document["gamma"] is None
    assert document["factors"] is None
    assert document["diagnostics"]["method"] == "jacobi"
    assert document["diagnostics"]["stationarity_residual"] <= 1e-8


def test_measure_ghz_multipartite(capsys):
    status, out, _ = run_cli(
        capsys,
        "measure", "--named", "ghz", "--n", "3",
        "--mode", "multipartite", "--seed", "1", "--format", "json",
    )
    assert status == 0
    document = json.loads(out)
    assert abs(document["j"] - 0.5) < 1e-8
    assert abs(document["gamma"] ** 2 - 0.5) < 1e-8
    assert document["lambda"] is None
    assert document["diagnostics"]["converged"] is True
    assert len(document["diagnostics"]["restart_gammas"]) == 16


def test_generate_perm_phase_then_measure(tmp_path, capsys):
    path = tmp_path / "state.json"
    status, _, _ = run_cli(
        capsys, "generate", "--perm-phase", "--n", "3", "--seed", "5", "--output", str(path)
    )
    assert status == 0
    state = loads_state(path.read_text())
    assert state.dims.dims == (3, 3)
    status, out, _ = run_cli(
        capsys, "measure", "--state", str(path), "--split", "0", "--format", "json"
    )
    assert status == 0
    assert abs(json.loads(out)["j"] - 2.0 / 3.0) < 1e-10


def test_generate_named_state_pipes_into_measure(tmp_path, capsys):
    path = tmp_path / "bell.json"
    assert run_cli(capsys, "generate", "--named", "bell_phi_plus", "--output", str(path))[0] == 0
    status, out, _ = run_cli(capsys, "measure", "--state", str(path), "--format", "json")
    assert status == 0
    assert abs(json.loads(out)["j"] - 0.5) < 1e-10


def test_random_state_document(capsys):
    status, out, _ = run_cli(capsys, "random", "--dims", "2,3", "--seed", "9")
    assert status == 0
    state = loads_state(out)
    assert state.dims.dims == (2, 3)
    assert abs(state.norm_squared - 1.0) < 1e-12


def test_parse_echoes_state_document(capsys):
    status, out, _ = run_cli(capsys, "parse", "--ket", "0.6|01> + 0.8|10>")
    assert status == 0
    state = loads_state(out)
    assert state.amplitudes[1] == pytest.approx(0.6)
    assert state.amplitudes[2] == pytest.approx(0.8)


def test_parse_normalize_flag(capsys):
    status, out, _ = run_cli(capsys, "parse", "--ket", "3|01> + 4|10>", "--normalize")
    assert status == 0
    state = loads_state(out)
    assert state.amplitudes[1] == pytest.approx(0.6)


def test_determinism_byte_identical(capsys):
    argv = ["measure", "--named", "w", "--n", "3", "--seed", "3", "--format", "json"]
    first = run_cli(capsys, *argv)
    second = run_cli(capsys, *argv)
    assert first == second


def test_factors_flag_emits_caveat(capsys):
    status, out, err = run_cli(
        capsys, "measure", "--ket", "(|+-> - |-+>)/sqrt(2)", "--factors", "--format", "json"
    )
    assert status == 0
    assert "gauge" in err
    document = json.loads(out)
    assert len(document["factors"]) == 2
    assert all(len(vec) == 2 for vec in document["factors"])


def test_exit_one_on_bad_ket(capsys):
    status, out, err = run_cli(capsys, "measure", "--ket", "(|00")
    assert status == 1
    assert out == ""
    assert "offset" in err


def test_exit_one_on_missing_file(capsys):
    status, _, err = run_cli(capsys, "measure", "--state", "/does/not/exist.json")
    assert status == 1
    assert "cannot read state file" in err


def test_exit_one_on_malformed_document(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"dims": [2, 2], "amplitudes": [[0, 0]]}')
    status, _, err = run_cli(capsys, "measure", "--state", str(path))
    assert status == 1
    assert "state file" in err


def test_exit_one_on_bad_flags(capsys):
    assert run_cli(capsys, "measure")[0] == 1
    assert run_cli(capsys, "measure", "--named", "ghz", "--split", "zero")[0] == 1
    assert run_cli(capsys, "measure", "--named", "bogus")[0] == 1
    assert run_cli(
        capsys, "measure", "--named", "ghz", "--mode", "multipartite", "--split", "0"
    )[0] == 1


def test_exit_two_on_solver_non_convergence(capsys):
    status, out, err = run_cli(
        capsys,
        "measure", "--named", "w", "--n", "3",
        "--mode", "multipartite", "--max-sweeps", "1", "--format", "json",
    )
    assert status == 2
    assert "converge" in err
    document = json.loads(out)
    assert document["diagnostics"]["converged"] is False


def test_no_normalize_reports_raw_measure(capsys):
    status, out, _ = run_cli(
        capsys, "measure", "--ket", "2|01> - 2|10>", "--no-normalize", "--format", "json"
    )
    assert status == 0
    document = json.loads(out)
    assert document["diagnostics"]["normalized"] is False
    assert document["diagnostics"]["norm_squared"] == pytest.approx(8.0)
    assert document["j"] == pytest.approx(4.0, abs=1e-9)  # 8 * J_normalized
    assert document["k"] == pytest.approx(1 / math.sqrt(2), abs=1e-10)


def test_module_entry_point_runs():
    result = subprocess.run(
        [sys.executable, "-m", "entmeasure", "measure", "--ket", "|00>", "--format", "json"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["j"] == pytest.approx(0.0, abs=1e-10)


def test_split_complement(capsys):
    status, out, _ = run_cli(
        capsys,
        "measure", "--named", "ghz", "--n", "3",
        "--mode", "bipartite", "--split", "1,2", "--format", "json",
    )
    assert status == 0
    document = json.loads(out)
    assert document["split"] == [1, 2]
    assert abs(document["j"] - 0.5) < 1e-10


def test_text_output_mentions_key_fields(capsys):
    status, out, _ = run_cli(capsys, "measure", "--named", "bell_singlet")
    assert status == 0
    fields = dict(
        line.split(" = ", 1) for line in out.strip().splitlines() if " = " in line
    )
    assert float(fields["J"]) == pytest.approx(0.5, abs=1e-10)
    assert float(fields["lambda"]) == pytest.approx(0.5, abs=1e-10)
    assert float(fields["K"]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert fields["method"] == "jacobi"
