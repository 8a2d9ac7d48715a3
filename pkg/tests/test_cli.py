import csv
import io
import json
import math

import numpy as np
import pytest

from heckelab_cli import build_parser, dispatch
from result_store import manifest_path


def _table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def _error_lines(err):
    payloads = []
    for line in err.splitlines():
        try:
            payload = json.loads(line)
        except ValueError:
            continue
        if isinstance(payload, dict) and "error" in payload:
            payloads.append(payload)
    return payloads


def test_parser_lists_every_subcommand():
    parser = build_parser()
    args = parser.parse_args(["--threads", "2", "hecke", "--n", "5", "--k", "1"])
    assert (args.command, args.threads, args.n, args.k) == ("hecke", 2, 5, 1)
    args = parser.parse_args(["hecke", "--n", "5", "--k", "1", "--threads", "3"])
    assert args.threads == 3


def test_rn_enumerate_csv(capsys):
    assert dispatch(["rn-enumerate", "--n", "5"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["a0", "a1", "a2", "a3"]
    assert len(rows) == 12
    assert rows[0] == ["-1", "-2", "0", "0"]


def test_rn_enumerate_json(capsys):
    assert dispatch(["rn-enumerate", "--n", "9", "--json"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["n"] == 9
    assert record["count"] == 26
    assert record["elements"][0] == [-3, 0, 0, 0]


def test_empty_level_prints_only_a_header(capsys):
    assert dispatch(["rn-enumerate", "--n", "3"]) == 0
    assert capsys.readouterr().out == "a0,a1,a2,a3\n"


def test_hecke_identity(capsys):
    assert dispatch(["hecke", "--n", "1", "--k", "3"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == [f"c{i}" for i in range(7)]
    assert np.allclose(np.array(rows, dtype=float), np.eye(7), atol=1e-12)


def test_library_errors_become_structured_output(capsys):
    assert dispatch(["hecke", "--n", "3", "--k", "2"]) == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    (payload,) = _error_lines(captured.err)
    assert payload["error"] == "EmptyLevelError"
    assert payload["subcommand"] == "hecke"


def test_usage_errors(capsys):
    assert dispatch(["no-such-command"]) == 2
    assert dispatch(["hecke", "--k", "2"]) == 2
    assert dispatch(["count-sphere", "--n", "5", "--delta-grid", "1:0:3"]) == 2
    assert dispatch(["count-hyp", "--n", "5", "--z", "0,-1", "--delta-grid", "1"]) == 2
    capsys.readouterr()


def test_output_file_and_manifest(tmp_path, capsys):
    out = tmp_path / "r5.csv"
    assert dispatch(["--seed", "17", "rn-enumerate", "--n", "5", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert out.read_text().startswith("a0,a1,a2,a3\n")
    with open(manifest_path(str(out))) as handle:
        manifest = json.load(handle)
    assert manifest["subcommand"] == "rn-enumerate"
    assert manifest["seed"] == 17
    assert manifest["parameters"]["flags"]["n"] == 5
    assert manifest["parameters"]["settings"]["runtime"]["seed"] == 17
    assert manifest["wall_time"] >= 0.0
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".heckelab-")] == []


def test_missing_output_directory(tmp_path, capsys):
    out = tmp_path / "missing" / "r5.csv"
    assert dispatch(["rn-enumerate", "--n", "5", "--out", str(out)]) == 1
    assert _error_lines(capsys.readouterr().err)[0]["error"] == "FileNotFoundError"


def test_config_file_errors(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("window.nonsense = 3\n")
    assert dispatch(["--config", str(config), "rn-enumerate", "--n", "5"]) == 1
    assert _error_lines(capsys.readouterr().err)[0]["error"] == "ConfigError"


def test_count_sphere(capsys):
    assert dispatch(["count-sphere", "--n", "5", "--delta-grid", "0.1,4"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["delta", "M"]
    # the four elements 1 +- 2k, -1 +- 2k turn about the pole and leave it fixed
    assert rows == [["0.10000000000000001", "4"], ["4", "12"]]


def test_count_hyperbolic(capsys):
    assert dispatch(["count-hyp", "--n", "1", "--z", "0,1", "--delta-grid", "0.001:0.001:1"]) == 0
    _, rows = _table(capsys.readouterr().out)
    assert rows == [["0.001", "2"]]


def test_spectrum(capsys):
    assert dispatch(["--threads", "2", "spectrum", "--levels", "5,13", "--kmax", "2"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["k", "j", "laplace_eig", "T5", "T13"]
    assert len(rows) == 1 + 3 + 5
    assert rows[0][:3] == ["0", "0", "0"]
    assert float(rows[0][3]) == pytest.approx(6.0)
    assert float(rows[0][4]) == pytest.approx(14.0)
    assert [row[0] for row in rows] == ["0"] + ["1"] * 3 + ["2"] * 5


def test_zonal_supnorm_and_fit(tmp_path, capsys):
    out = tmp_path / "zonal.csv"
    assert dispatch(["supnorm", "--family", "zonal", "--kmin", "4", "--kmax", "12", "--out", str(out)]) == 0
    header, rows = _table(out.read_text())
    assert header == ["k", "lambda", "j", "supnorm", "argmax"]
    for row in rows:
        k = int(row[0])
        assert float(row[3]) == pytest.approx(math.sqrt((2 * k + 1) / (4.0 * math.pi)), rel=1e-12)
        assert len(row[4].split(";")) == 3
    capsys.readouterr()

    assert dispatch(["fit", "--input", str(out), "--family", "zonal"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["degrees"] == 9
    assert record["slope"] == pytest.approx(0.25, abs=0.01)
    assert record["within_expectation"] is True
    assert record["subconvex_target"] == pytest.approx(5.0 / 24.0)


def test_fit_needs_enough_degrees(tmp_path, capsys):
    out = tmp_path / "short.csv"
    assert dispatch(["supnorm", "--family", "zonal", "--kmin", "1", "--kmax", "3", "--out", str(out)]) == 0
    assert dispatch(["fit", "--input", str(out)]) == 1
    assert _error_lines(capsys.readouterr().err)[0]["error"] == "InsufficientDataError"


def test_hecke_supnorm_rows(capsys):
    assert dispatch(["supnorm", "--levels", "5,13", "--kmin", "2", "--kmax", "3", "--polish", "10"]) == 0
    _, rows = _table(capsys.readouterr().out)
    assert len(rows) == 5 + 7
    for row in rows:
        assert 0.0 < float(row[3]) <= math.sqrt((2 * int(row[0]) + 1) / (4.0 * math.pi)) + 1e-12


def test_ktype_supnorm_rows(capsys):
    assert dispatch(["supnorm", "--levels", "5", "--kmin", "1", "--kmax", "3", "--ktype", "2", "--polish", "5"]) == 0
    _, rows = _table(capsys.readouterr().out)
    assert [row[0] for row in rows] == ["2"] * 5 + ["3"] * 7


def test_zonal_family_rejects_ktype(capsys):
    assert dispatch(["supnorm", "--family", "zonal", "--kmax", "3", "--ktype", "1"]) == 1
    assert _error_lines(capsys.readouterr().err)[0]["error"] == "DegenerateInputError"


def test_kernel_modes(capsys):
    assert dispatch(["kernel", "--mode", "diag", "--mu-min", "2", "--mu-max", "6", "--mu-steps", "3", "--kmax", "20"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["mu", "value", "sharp"]
    assert [row[0] for row in rows] == ["2", "4", "6"]

    assert dispatch(
        ["kernel", "--mode", "offdiag", "--mu-min", "5", "--mu-max", "5", "--mu-steps", "1", "--theta", "0.5:1.5:3", "--kmax", "20"]
    ) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["mu", "theta", "value"]
    assert len(rows) == 3

    assert dispatch(["kernel", "--mode", "hecke", "--n", "5", "--mu-min", "3", "--mu-max", "4", "--mu-steps", "2", "--kmax", "15"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["n", "mu", "value"]
    assert [row[0] for row in rows] == ["5", "5"]

    assert dispatch(["kernel", "--mode", "ktype", "--ktype", "2", "--mu-min", "3", "--mu-max", "4", "--mu-steps", "2", "--kmax", "15"]) == 0
    header, rows = _table(capsys.readouterr().out)
    assert header == ["mu", "l", "value"]


def test_kernel_offdiag_at_zero_angle_fails(capsys):
    assert dispatch(["kernel", "--mode", "offdiag", "--mu-min", "5", "--mu-max", "5", "--mu-steps", "1", "--theta", "0", "--kmax", "5"]) == 1
    assert _error_lines(capsys.readouterr().err)[0]["error"] == "InvalidPointError"


def test_amplify(capsys):
    assert dispatch(["amplify", "--mu", "6", "--N", "30", "--j0", "2:1", "--kmax", "8"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["levels"] == [5, 25]
    assert record["admissible_primes"]["count"] == 1
    assert record["j0"] == {"k": 2, "index": 1}
    assert record["relative_gap"] < 1e-8
    assert record["spectral"] >= record["self_amplification_floor"] * (1.0 - 1e-6)
    assert [term["level"] for term in record["terms"]] == [1, 5, 25, 125, 625]
    assert set(record["amplifier"]) == {"5", "25"}


def test_amplify_needs_a_prime(capsys):
    assert dispatch(["amplify", "--mu", "6", "--N", "20", "--j0", "1:0", "--kmax", "2"]) == 1
    assert _error_lines(capsys.readouterr().err)[0]["error"] == "InsufficientDataError"


def test_selfcheck_is_deterministic(capsys):
    assert dispatch(["--threads", "1", "--seed", "5", "selfcheck", "--kmax", "3"]) == 0
    first = capsys.readouterr().out
    assert dispatch(["--threads", "4", "--seed", "5", "selfcheck", "--kmax", "3"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert first.startswith("heckelab selfcheck (seed 5)\n")
    assert "FAIL" not in first
    assert first.rstrip().endswith("checks passed")
