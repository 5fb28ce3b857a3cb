"""Dense tensors, tensorization, unfoldings and elementary products.

Linearization order is column-major throughout: the first index varies
fastest. ``DenseTensor.values`` and every reshape in this package follow
that order, so ``vec`` of an outer product equals the Kronecker product
of the factors *in reverse numpy order*, e.g.
``kronecker([a, b]) == np.kron(b, a)``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import flops
from .errors import DimensionError, SizeError

__all__ = [
    "MAX_ELEMENTS",
    "DenseTensor",
    "as_shape",
    "as_array",
    "tensorize",
    "untensorize",
    "unfold",
    "fold",
    "outer_product",
    "kronecker",
    "inner_product",
    "vec",
]

MAX_ELEMENTS = 2**48


def as_shape(dims, cap: int = MAX_ELEMENTS) -> tuple[int, ...]:
    """Validate mode sizes: D >= 1, each >= 1, product <= ``cap``."""
    dims = tuple(int(d) for d in np.atleast_1d(np.asarray(dims, dtype=object)))
    if len(dims) == 0:
        raise DimensionError("a shape needs at least one mode")
    if any(d < 1 for d in dims):
        raise DimensionError(f"mode sizes must be >= 1, got {dims}")
    total = math.prod(dims)
    if total > cap:
        raise SizeError(f"shape {dims} has {total} elements, cap is {cap}")
    return dims


class DenseTensor:
    """Immutable D-way array of float64 values.

    Wraps an ndarray whose axes are the tensor modes. The flat ``values``
    view is in column-major order, which is also the order used by the
    binary container format.
    """

    __slots__ = ("_data",)

    def __init__(self, data, cap: int = MAX_ELEMENTS):
        if isinstance(data, DenseTensor):
            arr = data._data
        elif isinstance(data, np.ndarray) and not data.flags.writeable \
                and data.dtype == np.float64:
            arr = data
        else:
            arr = np.array(data, dtype=np.float64)
            arr.flags.writeable = False
        if arr.ndim == 0:
            raise DimensionError("a tensor needs at least one mode")
        as_shape(arr.shape, cap)
        self._data = arr

    @classmethod
    def from_values(cls, dims, values, cap: int = MAX_ELEMENTS) -> "DenseTensor":
        dims = as_shape(dims, cap)
        values = np.asarray(values, dtype=np.float64).ravel()
        if values.size != math.prod(dims):
            raise DimensionError(
                f"{values.size} values do not fill shape {dims}")
        return cls(values.reshape(dims, order="F"), cap)

    @classmethod
    def _wrap(cls, arr: np.ndarray, cap: int = MAX_ELEMENTS) -> "DenseTensor":
        # takes ownership of a freshly computed float64 array without copying
        arr = np.asarray(arr, dtype=np.float64)
        arr.flags.writeable = False
        return cls(arr, cap)

    @classmethod
    def zeros(cls, dims) -> "DenseTensor":
        return cls(np.zeros(as_shape(dims)))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    @property
    def values(self) -> np.ndarray:
        return self._data.reshape(-1, order="F")

    def norm(self) -> float:
        return float(np.linalg.norm(self._data.ravel()))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data if copy is not True else self._data.copy()
        return self._data.astype(dtype)

    def __getitem__(self, idx):
        return self._data[idx]

    def __repr__(self):
        return f"DenseTensor(shape={self.shape})"


def as_array(x) -> np.ndarray:
    if isinstance(x, DenseTensor):
        return x.data
    return np.asarray(x, dtype=np.float64)


def vec(x) -> np.ndarray:
    """Column-major vectorization."""
    return as_array(x).reshape(-1, order="F")


def tensorize(matrix, row_factors: Sequence[int], col_factors: Sequence[int]) -> DenseTensor:
    """Reshape an ``m x n`` matrix into a ``(row_factors..., col_factors...)`` tensor.

    Row ``m = i1 + p1*i2 + p1*p2*i3 + ...`` (mixed radix, first factor
    fastest), and likewise for columns.
    """
    M = as_array(matrix)
    if M.ndim != 2:
        raise DimensionError(f"tensorize expects a matrix, got {M.ndim} modes")
    rows = as_shape(row_factors)
    cols = as_shape(col_factors)
    if math.prod(rows) != M.shape[0] or math.prod(cols) != M.shape[1]:
        raise DimensionError(
            f"factors {rows} x {cols} do not match matrix shape {M.shape}")
    return DenseTensor(M.reshape(rows + cols, order="F"))


def untensorize(tensor, row_mode_count: int) -> DenseTensor:
    T = as_array(tensor)
    if not 1 <= row_mode_count < T.ndim:
        raise DimensionError(
            f"row_mode_count must be in [1, {T.ndim - 1}], got {row_mode_count}")
    rows = math.prod(T.shape[:row_mode_count])
    return DenseTensor(T.reshape((rows, -1), order="F"))


def unfold(tensor, mode: int) -> DenseTensor:
    """Mode-``mode`` matricization (1-based), remaining modes column-major."""
    T = as_array(tensor)
    if not 1 <= mode <= T.ndim:
        raise DimensionError(f"mode must be in [1, {T.ndim}], got {mode}")
    moved = np.moveaxis(T, mode - 1, 0)
    return DenseTensor(moved.reshape((T.shape[mode - 1], -1), order="F"))


def fold(matrix, mode: int, shape: Sequence[int]) -> DenseTensor:
    """Inverse of :func:`unfold`."""
    M = as_array(matrix)
    shape = as_shape(shape)
    if not 1 <= mode <= len(shape):
        raise DimensionError(f"mode must be in [1, {len(shape)}], got {mode}")
    lead = (shape[mode - 1],) + shape[: mode - 1] + shape[mode:]
    if M.shape != (lead[0], math.prod(lead[1:])):
        raise DimensionError(f"matrix {M.shape} cannot fold into {shape}")
    return DenseTensor(np.moveaxis(M.reshape(lead, order="F"), 0, mode - 1))


def _vectors(factors) -> list[np.ndarray]:
    vs = [np.asarray(as_array(f), dtype=np.float64).ravel() for f in factors]
    if not vs:
        raise ValueError("at least one factor is required")
    if any(v.size == 0 for v in vs):
        raise ValueError("factors must be nonempty")
    return vs


def outer_product(factors) -> DenseTensor:
    vs = _vectors(factors)
    out = vs[0]
    for v in vs[1:]:
        out = np.multiply.outer(out, v)
        flops.record(out.size, 0)
    return DenseTensor(out)


def kronecker(factors) -> np.ndarray:
    """Kronecker product in the column-major convention.

    Equals ``vec(outer_product(factors))``; the first factor varies fastest.
    """
    vs = _vectors(factors)
    out = vs[0]
    for v in vs[1:]:
        out = np.kron(v, out)
        flops.record(out.size, 0)
    return out


def inner_product(a, b) -> float:
    A, B = as_array(a), as_array(b)
    if A.shape != B.shape:
        raise DimensionError(f"inner product of shapes {A.shape} and {B.shape}")
    return flops.dot(A.ravel(), B.ravel())
