import os

import numpy as np
import pytest

from eraserlab.io import atomic_write_text, csv_text, read_csv, read_json, write_csv, write_json


def test_csv_lf_and_quoting(tmp_path):
    p = write_csv(tmp_path / "t.csv", ["a", "b"], [[1, "x,y"], [0.1, None]])
    raw = p.read_bytes()
    assert b"\r" not in raw
    assert raw == b'a,b\n1,"x,y"\n0.1,\n'
    header, rows = read_csv(p)
    assert header == ["a", "b"]
    assert rows == [["1", "x,y"], ["0.1", ""]]


def test_floats_roundtrip_exactly():
    x = np.float64(0.1) + np.float64(0.2)
    text = csv_text(["x"], [[x]])
    assert float(text.splitlines()[1]) == x


def test_numpy_scalars_and_bools():
    text = csv_text(["i", "b"], [[np.int64(3), np.True_]])
    assert text.splitlines()[1] == "3,1"


def test_json_roundtrip(tmp_path):
    obj = {"a": np.arange(3), "b": np.float64(1.5), "c": [1, 2]}
    p = write_json(tmp_path / "o.json", obj)
    assert read_json(p) == {"a": [0, 1, 2], "b": 1.5, "c": [1, 2]}


def test_atomic_write_leaves_no_temp(tmp_path):
    atomic_write_text(tmp_path / "f.txt", "hello")
    assert os.listdir(tmp_path) == ["f.txt"]


def test_atomic_write_failure_keeps_old_file(tmp_path, monkeypatch):
    target = tmp_path / "f.txt"
    target.write_text("old")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write_text(target, "new")
    assert target.read_text() == "old"
    assert os.listdir(tmp_path) == ["f.txt"]
