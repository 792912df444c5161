import json

import numpy as np
import pytest

from glpdrop.errors import DomainError
from glpdrop.field import Field
from glpdrop.formats import (atomic_write, csv_text, field_csv, field_from_bytes, field_to_bytes,
                             fmt, json_text, mask_csv, read_field, write_field)


def test_field_roundtrip(tmp_path, rng):
    f = Field(rng.uniform(-0.9, 0.9, (6, 6, 6)), 3.5, 2.0)
    data = field_to_bytes(f)
    assert data[:4] == b"GLPF"
    assert len(data) == 32 + 8 * 216
    g = field_from_bytes(data)
    np.testing.assert_array_equal(g.values, f.values)
    assert (g.L, g.beta) == (3.5, 2.0)
    p = write_field(tmp_path / "f.glpf", f)
    np.testing.assert_array_equal(read_field(p).values, f.values)


def test_bad_header():
    f = Field(np.zeros(8), 4.0, 2.0)
    data = bytearray(field_to_bytes(f))
    data[0:4] = b"XXXX"
    with pytest.raises(DomainError):
        field_from_bytes(bytes(data))
    with pytest.raises(DomainError):
        field_from_bytes(field_to_bytes(f)[:-8])


def test_full_precision():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(3) == "3" and fmt(float("nan")) == "nan"


def test_csv_layout():
    text = csv_text(["a", "b"], [(1, 0.5)], comments=["S=1"])
    assert text == "a,b\r\n1,0.5\r\n# S=1\r\n"


def test_field_and_mask_csv():
    f = Field(np.array([[0.1, 0.2], [0.3, 0.4]]), 4.0)
    lines = field_csv(f).strip().split("\r\n")
    assert lines[0] == "i,j,m" and lines[2] == "0,1,0.20000000000000001"
    assert mask_csv(np.array([True, False])).split("\r\n")[1] == "0,1"


def test_flat_json():
    text = json_text({"x": 1 / 3, "k": "v", "bad": float("inf")})
    obj = json.loads(text)
    assert obj["x"] == 1 / 3 and obj["bad"] is None and obj["k"] == "v"


def test_atomic_write_leaves_no_temp(tmp_path):
    atomic_write(tmp_path / "out.txt", "hello")
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
