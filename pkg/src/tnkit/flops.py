"""Instrumented floating-point operation counting.

Numerical kernels in tnkit call :func:`record` with the exact number of
scalar multiplies and additions they perform. Counts go to the innermost
active scope on the current thread; when a scope closes its totals are
folded into the enclosing scope, so an outer scope sees everything that
ran inside it.

Conventions: one multiply or one add is one unit, no fused multiply-add
collapsing. Divisions count as multiplies; subtractions count as additions.
Square roots and comparisons are not counted.
"""

from __future__ import annotations

import contextlib
import threading
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FlopCounter",
    "flop_scope",
    "count_scope",
    "record",
    "active_counter",
    "dot",
    "matvec",
    "matmul",
    "gram",
    "contract",
    "hadamard",
    "cholesky_cost",
    "lu_cost",
    "triangular_solve_cost",
]


@dataclass
class FlopCounter:
    label: str = ""
    multiplies: int = 0
    additions: int = 0

    @property
    def total(self) -> int:
        return self.multiplies + self.additions

    def add(self, multiplies: int = 0, additions: int = 0) -> None:
        if multiplies < 0 or additions < 0:
            raise ValueError("flop counts only increase")
        self.multiplies += int(multiplies)
        self.additions += int(additions)

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "multiplies": self.multiplies,
            "additions": self.additions,
            "total": self.total,
        }


_local = threading.local()


def _stack() -> list:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = _local.stack = []
    return stack


def active_counter() -> FlopCounter | None:
    stack = _stack()
    return stack[-1] if stack else None


def record(multiplies: int = 0, additions: int = 0) -> None:
    """Add counts to the innermost active scope (no-op outside any scope)."""
    stack = _stack()
    if stack:
        stack[-1].add(multiplies, additions)


@contextlib.contextmanager
def flop_scope(label: str = ""):
    counter = FlopCounter(label)
    stack = _stack()
    stack.append(counter)
    try:
        yield counter
    finally:
        stack.pop()
        if stack:
            stack[-1].add(counter.multiplies, counter.additions)


def count_scope(label, computation, *args, **kwargs):
    """Run ``computation(*args, **kwargs)`` inside a fresh scope.

    Returns
    -------
    result, counter : tuple
        The computation's return value and the populated :class:`FlopCounter`.
    """
    with flop_scope(label) as counter:
        result = computation(*args, **kwargs)
    return result, counter


# -- counted kernels ---------------------------------------------------------

def dot(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dot of lengths {a.size} and {b.size}")
    n = a.size
    record(n, max(n - 1, 0))
    return float(a @ b)


def matvec(A, x):
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    m, n = A.shape
    record(m * n, m * max(n - 1, 0))
    return A @ x


def matmul(A, B):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    m, k = A.shape
    k2, n = B.shape
    if k != k2:
        raise ValueError(f"matmul of {A.shape} and {B.shape}")
    record(m * k * n, m * n * max(k - 1, 0))
    return A @ B


def gram(A):
    """``A.T @ A`` counted as a symmetric rank-k update (one triangle)."""
    A = np.asarray(A, dtype=np.float64)
    n, m = A.shape
    entries = m * (m + 1) // 2
    record(entries * n, entries * max(n - 1, 0))
    return A.T @ A


def hadamard(*arrays):
    out = np.asarray(arrays[0], dtype=np.float64)
    for other in arrays[1:]:
        out = out * other
        record(out.size, 0)
    return out


def contract(a, a_axes, b, b_axes, out_axes):
    """Two-operand einsum with integer axis labels, counted exactly.

    Every output entry is a sum of ``c`` products where ``c`` is the size of
    the summed index space: ``c`` multiplies (one per product pair) and
    ``c - 1`` additions.
    """
    sizes = {}
    for arr, axes in ((a, a_axes), (b, b_axes)):
        if arr.ndim != len(axes):
            raise ValueError("axis labels do not match operand rank")
        for ax, n in zip(axes, arr.shape):
            if sizes.setdefault(ax, n) != n:
                raise ValueError(f"index {ax} has inconsistent sizes")
    out_size = 1
    for ax in out_axes:
        out_size *= sizes[ax]
    summed = 1
    for ax in set(a_axes) | set(b_axes):
        if ax not in out_axes:
            summed *= sizes[ax]
    record(out_size * summed, out_size * max(summed - 1, 0))
    return np.einsum(a, list(a_axes), b, list(b_axes), list(out_axes), optimize=True)


# -- costs of factorizations, recorded by callers ------------------------------

def cholesky_cost(n: int) -> tuple[int, int]:
    """Exact multiply/add counts of an unblocked n x n Cholesky factorization.

    Column j: the diagonal needs j multiplies and j additions (subtraction
    included); each of the n-1-j entries below needs j multiplies, j
    additions and one division.
    """
    mults = adds = 0
    for j in range(n):
        below = n - 1 - j
        mults += j + below * (j + 1)
        adds += j + below * j
    return mults, adds


def lu_cost(n: int) -> tuple[int, int]:
    """Multiply/add counts of Gaussian elimination without the solve.

    Step k computes n-1-k multipliers (divisions) and updates the trailing
    (n-1-k)^2 block with one multiply and one subtraction each.
    """
    mults = adds = 0
    for k in range(n):
        m = n - 1 - k
        mults += m + m * m
        adds += m * m
    return mults, adds


def triangular_solve_cost(n: int, unit_diagonal: bool = False) -> tuple[int, int]:
    off = n * (n - 1) // 2
    return off + (0 if unit_diagonal else n), off
