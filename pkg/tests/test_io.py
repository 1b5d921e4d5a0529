import csv
import io

import numpy as np
import pytest

from ymhk.flow import FlowState
from ymhk.io import MAGIC, export_site_norms, load_state, read_field, save_state, write_field
from ymhk.lattice import LatticeGeom, SeededSpectrum, TensorField, random_field


def _state(tag="SU2", N=3):
    g = LatticeGeom(N, 2.0)
    A = random_field(g, 1, tag, SeededSpectrum(0))
    u = random_field(g, 0, tag, SeededSpectrum(1))
    return FlowState(0.125, A, u, 2)


@pytest.mark.parametrize("tag", ["U1", "SU2"])
def test_state_roundtrip_bitwise(tmp_path, tag):
    s = _state(tag)
    save_state(tmp_path / "s.bin", s)
    r = load_state(tmp_path / "s.bin")
    assert r.t == s.t and r.k == s.k and r.geom == s.geom and r.group.tag == tag
    assert np.array_equal(r.A.values, s.A.values) and np.array_equal(r.u.values, s.u.values)


def test_storage_order_x1_fastest():
    g = LatticeGeom(3)
    v = np.zeros((3, 3, 3, 3, 1))
    v[1, 0, 0, 0] = 1.0
    v[0, 1, 0, 0] = 2.0
    buf = io.BytesIO()
    write_field(buf, TensorField(g, "U1", v))
    raw = buf.getvalue()
    assert raw[:4] == MAGIC
    payload = np.frombuffer(raw[-8 * 81 :], dtype="<f8")
    assert payload[1] == 1.0 and payload[3] == 2.0


def test_read_errors():
    buf = io.BytesIO()
    write_field(buf, TensorField.zeros(LatticeGeom(3), 0, "U1"))
    raw = buf.getvalue()
    assert read_field(io.BytesIO(b"")) is None
    with pytest.raises(ValueError, match="magic"):
        read_field(io.BytesIO(b"XXXX" + raw[4:]))
    with pytest.raises(ValueError, match="truncated"):
        read_field(io.BytesIO(raw[:-8]))
    with pytest.raises(ValueError, match="truncated"):
        read_field(io.BytesIO(raw[:10]))


def test_load_state_requires_two_records(tmp_path):
    p = tmp_path / "one.bin"
    with open(p, "wb") as fh:
        write_field(fh, TensorField.zeros(LatticeGeom(3), 1, "U1"))
    with pytest.raises(ValueError):
        load_state(p)


def test_export_site_norms(tmp_path):
    g = LatticeGeom(3)
    v = np.zeros((3, 3, 3, 3, 3))
    v[2, 0, 0, 0] = [3.0, 4.0, 0.0]
    export_site_norms(TensorField(g, "SU2", v), tmp_path / "n.csv")
    rows = list(csv.reader(open(tmp_path / "n.csv")))
    assert rows[0] == ["x1", "x2", "x3", "x4", "norm"]
    assert len(rows) == 82
    assert rows[3] == ["2", "0", "0", "0", "5.0"]
