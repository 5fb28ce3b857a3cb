"""Binary containers for tensors, decompositions, layers and models.

Tensor block (all integers unsigned 64-bit little-endian)::

    b"TNKTENS1"  D  dim_1 ... dim_D  values (float64 LE, column-major)

Network container::

    b"TNKTNET1"  len(meta)  meta (UTF-8 JSON, has a "type" tag)  K  block_1 ... block_K

Network types: ``cp`` (weights, factors...), ``tucker`` (core, factors...),
``tt`` (cores...), ``ttlayer`` (cores...), ``tkrr`` (weights, factors...,
feature map in the metadata) and ``dense-ridge`` (weights, feature map in
the metadata).
"""

from __future__ import annotations

import io
import json
import struct

import numpy as np

from .decomp import CPDecomp, TTDecomp, TuckerDecomp
from .errors import FormatError
from .tensor import DenseTensor, as_array
from .tkrr import DenseRidgeModel, FeatureMap, TkrrModel
from .ttlayer import TTLayer

__all__ = [
    "TENSOR_MAGIC",
    "NETWORK_MAGIC",
    "tensor_to_bytes",
    "tensor_from_bytes",
    "save_tensor",
    "load_tensor",
    "network_to_bytes",
    "network_from_bytes",
    "save_network",
    "load_network",
]

TENSOR_MAGIC = b"TNKTENS1"
NETWORK_MAGIC = b"TNKTNET1"
_U64 = struct.Struct("<Q")


def _write_block(out, array) -> None:
    arr = np.asarray(as_array(array), dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    out.write(TENSOR_MAGIC)
    out.write(_U64.pack(arr.ndim))
    for n in arr.shape:
        out.write(_U64.pack(n))
    out.write(arr.reshape(-1, order="F").astype("<f8").tobytes())


def _read_exact(src, n: int) -> bytes:
    data = src.read(n)
    if len(data) != n:
        raise FormatError(f"truncated container: wanted {n} bytes, got {len(data)}")
    return data


def _read_u64(src) -> int:
    return _U64.unpack(_read_exact(src, 8))[0]


def _read_block(src) -> np.ndarray:
    if _read_exact(src, 8) != TENSOR_MAGIC:
        raise FormatError("not a tnkit tensor block")
    D = _read_u64(src)
    if D < 1 or D > 64:
        raise FormatError(f"implausible number of modes {D}")
    dims = tuple(_read_u64(src) for _ in range(D))
    count = 1
    for n in dims:
        count *= n
    raw = _read_exact(src, 8 * count)
    return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(dims, order="F")


def tensor_to_bytes(tensor) -> bytes:
    buf = io.BytesIO()
    _write_block(buf, tensor)
    return buf.getvalue()


def tensor_from_bytes(data: bytes) -> DenseTensor:
    src = io.BytesIO(data)
    arr = _read_block(src)
    if src.read(1):
        raise FormatError("trailing bytes after tensor block")
    return DenseTensor(arr)


def save_tensor(path, tensor) -> None:
    with open(path, "wb") as fh:
        fh.write(tensor_to_bytes(tensor))


def load_tensor(path) -> DenseTensor:
    with open(path, "rb") as fh:
        return tensor_from_bytes(fh.read())


def _encode(obj):
    if isinstance(obj, TkrrModel):
        w = obj.weight_network
        meta = {"type": "tkrr", "feature_map": obj.feature_map.to_dict(), "reg": obj.reg}
        return meta, [w.weights, *w.factors]
    if isinstance(obj, DenseRidgeModel):
        meta = {"type": "dense-ridge", "feature_map": obj.feature_map.to_dict(),
                "reg": obj.reg}
        return meta, [obj.weights]
    if isinstance(obj, CPDecomp):
        return {"type": "cp"}, [obj.weights, *obj.factors]
    if isinstance(obj, TuckerDecomp):
        return {"type": "tucker"}, [obj.core, *obj.factors]
    if isinstance(obj, TTDecomp):
        return {"type": "tt"}, list(obj.cores)
    if isinstance(obj, TTLayer):
        return {"type": "ttlayer"}, list(obj.cores)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _decode(meta: dict, blocks: list):
    kind = meta.get("type")
    try:
        if kind == "cp":
            return CPDecomp(blocks[0], tuple(blocks[1:]))
        if kind == "tucker":
            return TuckerDecomp(blocks[0], tuple(blocks[1:]))
        if kind == "tt":
            return TTDecomp(tuple(blocks))
        if kind == "ttlayer":
            return TTLayer(tuple(blocks))
        if kind == "tkrr":
            fm = FeatureMap.from_dict(meta["feature_map"])
            return TkrrModel(CPDecomp(blocks[0], tuple(blocks[1:])), fm, float(meta["reg"]))
        if kind == "dense-ridge":
            fm = FeatureMap.from_dict(meta["feature_map"])
            return DenseRidgeModel(blocks[0], fm, float(meta["reg"]))
    except (KeyError, IndexError, ValueError) as exc:
        raise FormatError(f"invalid {kind} container: {exc}") from exc
    raise FormatError(f"unknown network type {kind!r}")


def network_to_bytes(obj, extra_meta: dict | None = None) -> bytes:
    meta, blocks = _encode(obj)
    if extra_meta:
        meta = {**extra_meta, **meta}
    text = json.dumps(meta, sort_keys=True).encode("utf-8")
    buf = io.BytesIO()
    buf.write(NETWORK_MAGIC)
    buf.write(_U64.pack(len(text)))
    buf.write(text)
    buf.write(_U64.pack(len(blocks)))
    for b in blocks:
        _write_block(buf, b)
    return buf.getvalue()


def network_from_bytes(data: bytes, expected_type: str | None = None):
    src = io.BytesIO(data)
    if _read_exact(src, 8) != NETWORK_MAGIC:
        raise FormatError("not a tnkit network container")
    try:
        meta = json.loads(_read_exact(src, _read_u64(src)).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupt container metadata: {exc}") from exc
    if not isinstance(meta, dict):
        raise FormatError("container metadata must be a JSON object")
    blocks = [_read_block(src) for _ in range(_read_u64(src))]
    if src.read(1):
        raise FormatError("trailing bytes after network container")
    if expected_type is not None and meta.get("type") != expected_type:
        raise FormatError(f"expected a {expected_type} container, found {meta.get('type')!r}")
    return _decode(meta, blocks)


def save_network(path, obj, extra_meta: dict | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(network_to_bytes(obj, extra_meta))


def load_network(path, expected_type: str | None = None):
    with open(path, "rb") as fh:
        return network_from_bytes(fh.read(), expected_type)
