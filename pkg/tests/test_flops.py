import threading

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tnkit import flops
from tnkit.tensor import kronecker, outer_product


def naive_cholesky_ops(n):
    # count the scalar operations of the textbook algorithm by running it
    A = np.eye(n) * n + 1.0
    L = np.zeros((n, n))
    m = a = 0
    for j in range(n):
        s = A[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
            m += 1
            a += 1
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            s = A[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
                m += 1
                a += 1
            L[i, j] = s / L[j, j]
            m += 1
    return m, a


def naive_lu_ops(n):
    m = a = 0
    for k in range(n):
        for i in range(k + 1, n):
            m += 1  # multiplier
            for j in range(k + 1, n):
                m += 1
                a += 1
    return m, a


def test_dot_counts():
    _, c = flops.count_scope("dot", flops.dot, np.ones(7), np.ones(7))
    assert (c.multiplies, c.additions) == (7, 6)


def test_matvec_counts():
    _, c = flops.count_scope("mv", flops.matvec, np.ones((3, 5)), np.ones(5))
    assert (c.multiplies, c.additions) == (15, 12)


def test_matmul_counts_and_value(rng):
    A, B = rng.standard_normal((3, 4)), rng.standard_normal((4, 2))
    out, c = flops.count_scope("mm", flops.matmul, A, B)
    np.testing.assert_allclose(out, A @ B)
    assert (c.multiplies, c.additions) == (24, 18)


def test_kronecker_and_outer_counts():
    _, c = flops.count_scope("k", kronecker, [np.ones(2), np.ones(3), np.ones(4)])
    assert (c.multiplies, c.additions) == (6 + 24, 0)
    _, c = flops.count_scope("o", outer_product, [np.ones(2), np.ones(3)])
    assert (c.multiplies, c.additions) == (6, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_factorization_costs_match_loop_counts(n):
    assert flops.cholesky_cost(n) == naive_cholesky_ops(n)
    assert flops.lu_cost(n) == naive_lu_ops(n)


def test_contract_counts_like_matmul(rng):
    A, B = rng.standard_normal((3, 4)), rng.standard_normal((4, 5))
    out, c = flops.count_scope("c", flops.contract, A, [0, 1], B, [1, 2], [0, 2])
    np.testing.assert_allclose(out, A @ B)
    assert (c.multiplies, c.additions) == (60, 45)


def test_nested_scopes_fold_into_parent():
    with flops.flop_scope("outer") as outer:
        flops.record(1, 1)
        with flops.flop_scope("inner") as inner:
            flops.record(5, 3)
            # counts go to the innermost scope only
            assert (outer.multiplies, outer.additions) == (1, 1)
        assert (inner.multiplies, inner.additions) == (5, 3)
    assert (outer.multiplies, outer.additions) == (6, 4)
    assert outer.total == 10


def test_record_outside_scope_is_noop():
    flops.record(10, 10)
    assert flops.active_counter() is None


def test_counts_never_decrease():
    c = flops.FlopCounter()
    with pytest.raises(ValueError):
        c.add(-1, 0)


def test_scopes_are_thread_confined():
    seen = {}

    def worker():
        with flops.flop_scope("t") as c:
            flops.record(100, 0)
        seen["t"] = c.multiplies

    with flops.flop_scope("main") as main:
        t = threading.Thread(target=worker)
        t.start()
        t.join()
        flops.record(1, 0)
    assert seen["t"] == 100 and main.multiplies == 1


@given(st.integers(1, 50))
def test_dot_formula(n):
    _, c = flops.count_scope("d", flops.dot, np.ones(n), np.ones(n))
    assert (c.multiplies, c.additions) == (n, n - 1)
