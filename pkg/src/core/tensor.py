"""
Portable tensor container and the GTF file format.

A GTF file is one UTF-8 JSON header line
``{"magic":"GTF1","dtype":"f32","dims":[...]}`` terminated by a newline,
followed by exactly ``product(dims)`` little-endian float32 values in
row-major order. Tensors live in memory as float64.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.utils.errors import DomainError, FormatError, ShapeError
from src.utils.io import atomic_write_bytes

MAGIC = "GTF1"
DTYPE = "f32"
_F32_MAX = float(np.finfo(np.float32).max)


@dataclass(frozen=True)
class TensorF:
    """Row-major float64 tensor with explicit dims."""

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d <= 0 for d in dims):
            raise ShapeError(f"dims must be non-empty positive extents, got {list(dims)}")
        data = np.ascontiguousarray(self.data, dtype=np.float64).reshape(-1)
        if data.size != math.prod(dims):
            raise ShapeError(f"product of dims {list(dims)} is {math.prod(dims)} but data has {data.size} values")
        if not np.all(np.isfinite(data)):
            raise DomainError("tensor values must be finite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array) -> "TensorF":
        array = np.asarray(array, dtype=np.float64)
        return cls(dims=array.shape, data=array.reshape(-1))

    def to_array(self) -> np.ndarray:
        return self.data.reshape(self.dims).copy()


def _encode(t: TensorF) -> bytes:
    if np.any(np.abs(t.data) > _F32_MAX):
        raise DomainError("tensor values exceed float32 range")
    header = json.dumps({"magic": MAGIC, "dtype": DTYPE, "dims": list(t.dims)}, separators=(",", ":"))
    return header.encode("utf-8") + b"\n" + t.data.astype("<f4").tobytes()


def save_tensor(t: TensorF, path: str | Path) -> Path:
    """Write ``t`` as a GTF file (atomically)."""
    return atomic_write_bytes(path, _encode(t))


def load_tensor(path: str | Path) -> TensorF:
    """Read a GTF file, validating header and payload length."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"Cannot read tensor file {path}: {exc}") from exc

    newline = raw.find(b"\n")
    if newline < 0:
        raise FormatError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: header is not valid JSON") from exc

    if not isinstance(header, dict) or header.get("magic") != MAGIC:
        raise FormatError(f"{path}: bad magic, expected {MAGIC}")
    if header.get("dtype") != DTYPE:
        raise FormatError(f"{path}: unsupported dtype {header.get('dtype')!r}")
    dims = header.get("dims")
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)
    ):
        raise FormatError(f"{path}: dims must be a non-empty list of positive integers, got {dims!r}")

    payload = raw[newline + 1:]
    expected = 4 * math.prod(dims)
    if len(payload) != expected:
        raise FormatError(f"{path}: payload has {len(payload)} bytes, dims {dims} need {expected}")

    values = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: payload contains non-finite values")
    return TensorF(dims=tuple(dims), data=values)


def save_array(array, path: str | Path) -> Path:
    return save_tensor(TensorF.from_array(array), path)


def load_array(path: str | Path) -> np.ndarray:
    return load_tensor(path).to_array()
