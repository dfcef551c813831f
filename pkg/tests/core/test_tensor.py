import numpy as np
import pytest

from src.core.tensor import TensorF, load_array, load_tensor, save_array, save_tensor
from src.utils.errors import DomainError, FormatError, ShapeError


def test_round_trip_2x3(tmp_path):
    t = TensorF(dims=(2, 3), data=np.array([0.1, 0.2, 0.3, 1.0, -2.5, 1e-3]))
    path = save_tensor(t, tmp_path / "t.gtf")
    back = load_tensor(path)
    assert back.dims == (2, 3)
    assert np.allclose(back.data, t.data.astype(np.float32))


def test_header_layout(tmp_path):
    path = save_array(np.zeros((1, 2)), tmp_path / "z.gtf")
    raw = path.read_bytes()
    header, payload = raw.split(b"\n", 1)
    assert header == b'{"magic":"GTF1","dtype":"f32","dims":[1,2]}'
    assert len(payload) == 8


def test_truncated_payload(tmp_path):
    path = save_array(np.ones((4, 4)), tmp_path / "t.gtf")
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError):
        load_array(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.gtf"
    path.write_bytes(b'{"magic":"NOPE","dtype":"f32","dims":[1]}\n\x00\x00\x00\x00')
    with pytest.raises(FormatError):
        load_array(path)


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        load_array(tmp_path / "absent.gtf")


def test_dims_must_match_data():
    with pytest.raises(ShapeError):
        TensorF(dims=(2, 2), data=np.zeros(3))


def test_non_finite_rejected():
    with pytest.raises(DomainError):
        TensorF.from_array(np.array([1.0, np.nan]))
