import csv
import io
import json
import math

import numpy as np
import pytest

from cvteleport.cli import main, parse_grid, parse_state
from cvteleport import CoherentInput, FockInput, FockMixtureInput, InvalidArgumentError, SqueezedVacuumInput


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# cvteleport ")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return rows


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_parse_state_grammar():
    assert parse_state("fock:1") == FockInput(1)
    assert parse_state("coherent:2.12928") == CoherentInput(2.12928)
    assert parse_state("coherent:1.0,0.5") == CoherentInput(1.0 + 0.5j)
    assert parse_state("sqvac:1.5") == SqueezedVacuumInput(1.5)
    assert parse_state("mix:0@0.5,1@0.5") == FockMixtureInput(((0, 0.5), (1, 0.5)))


def test_parse_state_rejects_garbage():
    for text in ("fock", "fock:x", "cat:2", "mix:0@0.4,1@0.4"):
        with pytest.raises(InvalidArgumentError):
            parse_state(text)


def test_parse_grid_forms():
    assert parse_grid("0.5:1.0:3") == [0.5, 0.75, 1.0]
    assert parse_grid("0.75,1.0,2.5") == [0.75, 1.0, 2.5]
    assert parse_grid(1.25) == [1.25]
    with pytest.raises(InvalidArgumentError):
        parse_grid("0:1:0")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def test_optimize_subcommand(capsys):
    code, out, _ = run_cli(["optimize", "--kind", "x2_transfer", "--r", "2.5"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert abs(float(rows[0]["delta_star"]) - 0.92388) <= 1e-4


def test_moments_identity_channel(capsys):
    code, out, _ = run_cli(
        ["moments", "--input", "coherent:2.12928", "--identity-channel", "--format", "json"],
        capsys,
    )
    assert code == 0
    ms = json.loads(out)
    assert abs(ms["n_mean"] - 4.534) <= 1e-3
    assert ms["g2_zero"] == pytest.approx(1.0, abs=1e-9)


def test_moments_with_channel_csv(capsys):
    code, out, _ = run_cli(
        ["moments", "--input", "fock:1", "--delta", "0.92388", "--r", "1.25"], capsys
    )
    assert code == 0
    rows = read_csv(out)
    assert float(rows[0]["n_mean"]) > 1.0  # teleportation adds photons


def test_photon_stats_identity(capsys):
    code, out, _ = run_cli(
        ["photon-stats", "--input", "fock:1", "--N", "3", "--identity-channel"], capsys
    )
    assert code == 0
    rows = read_csv(out)
    assert [float(r["P_in"]) for r in rows] == [0.0, 1.0, 0.0, 0.0]
    assert [float(r["P_out"]) for r in rows] == [0.0, 1.0, 0.0, 0.0]


def test_photon_stats_channel(capsys):
    code, out, _ = run_cli(
        ["photon-stats", "--input", "fock:1", "--N", "6", "--delta", "0.9", "--r", "1.25"],
        capsys,
    )
    rows = read_csv(out)
    p_out = [float(r["P_out"]) for r in rows]
    assert code == 0 and p_out[1] > 0.8 and abs(sum(p_out) - 1.0) <= 0.01


def test_compare_fock1_optima_differ(capsys):
    """D_N and (1 - F) reach their grid minima at different Delta."""
    code, out, _ = run_cli(
        ["compare", "--input", "fock:1", "--r", "1.25", "--delta-grid", "0.7:1.0:61", "--N", "24"],
        capsys,
    )
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 61
    d = np.array([float(r["d_n"]) for r in rows])
    one_minus_f = np.array([float(r["one_minus_fidelity"]) for r in rows])
    assert int(np.argmin(d)) != int(np.argmin(one_minus_f))


def test_byte_identical_reruns(capsys):
    args = ["compare", "--input", "fock:1", "--r", "1.0", "--delta-grid", "0.85:0.95:3", "--N", "8"]
    _, out1, _ = run_cli(args, capsys)
    _, out2, _ = run_cli(args, capsys)
    assert out1 == out2


def test_jobs_flag_deterministic(capsys):
    base = ["compare", "--input", "fock:0", "--r", "1.0", "--delta-grid", "0.8:1.0:5", "--N", "8"]
    _, out1, _ = run_cli(base + ["--jobs", "1"], capsys)
    _, out2, _ = run_cli(base + ["--jobs", "3"], capsys)
    assert out1 == out2


def test_jobs_env_default(capsys, monkeypatch):
    monkeypatch.setenv("CVTELEPORT_JOBS", "2")
    base = ["compare", "--input", "fock:0", "--r", "1.0", "--delta-grid", "0.9:1.0:3", "--N", "6"]
    code, out, _ = run_cli(base, capsys)
    assert code == 0 and len(read_csv(out)) == 3


def test_sweep_subcommand(capsys):
    code, out, _ = run_cli(
        ["sweep", "--kinds", "x2_transfer,kappa4_transfer", "--r-grid", "0.5,1.0"], capsys
    )
    assert code == 0
    rows = read_csv(out)
    assert [r["kind"] for r in rows] == ["x2_transfer"] * 2 + ["kappa4_transfer"] * 2
    assert all(r["status"] == "ok" for r in rows)


def test_sweep_flags_failed_cells(capsys):
    code, out, _ = run_cli(
        ["sweep", "--kinds", "one_minus_fidelity", "--r-grid", "1.0"], capsys
    )
    assert code == 0
    rows = read_csv(out)
    assert rows[0]["status"].startswith("error:")


def test_transfer_surface(capsys):
    code, out, _ = run_cli(["transfer-surface", "--r", "1.25", "--grid=-2:2:5"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 4 * 25
    presets = {r["preset"] for r in rows}
    assert presets == {"tmsv", "photon_subtracted", "photon_added", "coherent_optimal"}
    tmsv_origin = [
        r for r in rows if r["preset"] == "tmsv" and float(r["w"]) == 0.0 and float(r["z"]) == 0.0
    ]
    assert float(tmsv_origin[0]["tau"]) == 1.0


def test_json_output_is_row_array(capsys):
    code, out, _ = run_cli(
        ["optimize", "--kind", "x2_transfer", "--r", "1.0", "--format", "json"], capsys
    )
    rows = json.loads(out)
    assert isinstance(rows, list) and rows[0]["kind"] == "x2_transfer"


def test_output_file_and_provenance(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run_cli(
        ["optimize", "--kind", "x2_transfer", "--r", "1.0", "--output", str(path)], capsys
    )
    assert code == 0 and out == ""
    text = path.read_text()
    first = text.splitlines()[0]
    assert first.startswith("# cvteleport 1.0.0 config=") and len(first.split("config=")[1]) == 12


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "x2_transfer", "r": 1.0, "N": 8}))
    code, out, _ = run_cli(["optimize", "--config", str(cfg)], capsys)
    assert code == 0
    assert abs(float(read_csv(out)[0]["r"]) - 1.0) == 0.0
    code, out, _ = run_cli(["optimize", "--config", str(cfg), "--r", "2.0"], capsys)
    assert float(read_csv(out)[0]["r"]) == 2.0


def test_error_record_and_exit_code(capsys):
    code, out, err = run_cli(["moments", "--input", "cat:2"], capsys)
    assert code == 1 and out == ""
    record = json.loads(err)
    assert record["error"]["type"] == "InvalidArgumentError"


def test_bad_delta_rejected(capsys):
    code, _, err = run_cli(
        ["photon-stats", "--input", "fock:0", "--delta", "1.5", "--r", "1.0"], capsys
    )
    assert code == 1
    assert "delta" in json.loads(err)["error"]["message"]
