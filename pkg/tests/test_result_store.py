import io
import json
import os

import numpy as np
import pytest

from result_store import (
    ResultStore,
    RunManifest,
    ScanResult,
    format_cell,
    manifest_path,
    read_csv,
    render,
    render_csv,
    to_jsonable,
)


def _manifest():
    return RunManifest(subcommand="hecke", parameters={"flags": {"n": 5}}, seed=3, anchor="T_n on H_k", wall_time=0.5)


def test_format_cell():
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(np.float64(2.0)) == "2"
    assert format_cell(np.int64(-7)) == "-7"
    assert format_cell(True) == "true"
    assert format_cell(np.bool_(False)) == "false"
    assert format_cell((1, 2.5, -0.25)) == "1;2.5;-0.25"
    assert format_cell("5+1i") == "5+1i"


def test_to_jsonable():
    payload = {
        1: np.array([1.5, 2.0]),
        "c": complex(1.0, -2.0),
        "t": (np.int64(4), None, "x"),
        "flag": np.bool_(True),
        "bad": float("nan"),
    }
    assert to_jsonable(payload) == {
        "1": [1.5, 2.0],
        "c": {"re": 1.0, "im": -2.0},
        "t": [4, None, "x"],
        "flag": True,
        "bad": "nan",
    }
    assert to_jsonable(ValueError("bad level")) == "bad level"


def test_render_table_and_record():
    table = ScanResult(header=["k", "value"], rows=[[1, 0.5], [2, 1.0 / 3.0]])
    assert table.is_table
    assert render(table) == "k,value\n1,0.5\n2,0.33333333333333331\n"
    record = ScanResult(record={"b": 1, "a": [1, 2]})
    assert not record.is_table
    assert json.loads(render(record)) == {"a": [1, 2], "b": 1}
    assert render(ScanResult(text="report\n")) == "report\n"
    assert render_csv(["a"], []) == "a\n"


def test_manifest_to_dict():
    manifest = _manifest().to_dict()
    assert manifest["subcommand"] == "hecke"
    assert manifest["seed"] == 3
    assert manifest["version"]
    assert manifest["wall_time"] == 0.5


def test_save_to_stream_writes_no_files(tmp_path):
    stream = io.StringIO()
    ResultStore(stream=stream).save(ScanResult(header=["n"], rows=[[5]]), None, _manifest())
    assert stream.getvalue() == "n\n5\n"


def test_save_to_file_writes_manifest(tmp_path):
    out = str(tmp_path / "table.csv")
    ResultStore().save(ScanResult(header=["n", "x"], rows=[[5, 0.25]]), out, _manifest())
    assert read_csv(out) == [{"n": "5", "x": "0.25"}]
    with open(manifest_path(out)) as handle:
        assert json.load(handle)["anchor"] == "T_n on H_k"
    assert sorted(os.listdir(tmp_path)) == ["table.csv", "table.csv.manifest.json"]


def test_write_atomic_replaces_whole_file(tmp_path):
    path = str(tmp_path / "out.txt")
    store = ResultStore()
    store.write_atomic(path, "first version, rather long\n")
    store.write_atomic(path, "second\n")
    with open(path) as handle:
        assert handle.read() == "second\n"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_write_atomic_into_missing_directory(tmp_path):
    with pytest.raises(OSError):
        ResultStore().write_atomic(str(tmp_path / "nowhere" / "out.txt"), "x")
