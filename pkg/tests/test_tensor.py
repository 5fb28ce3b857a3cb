import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from tnkit.errors import DimensionError, SizeError
from tnkit.tensor import (MAX_ELEMENTS, DenseTensor, as_shape, fold, inner_product,
                          kronecker, outer_product, tensorize, unfold, untensorize, vec)


def linear_index(idx, dims):
    # column-major: first index fastest
    k, stride = 0, 1
    for i, n in zip(idx, dims):
        k += i * stride
        stride *= n
    return k


# -- shapes and the dense type --------------------------------------------------

def test_shape_rejects_empty_and_nonpositive():
    with pytest.raises(DimensionError):
        as_shape(())
    with pytest.raises(DimensionError):
        as_shape((2, 0))


def test_shape_cap():
    assert MAX_ELEMENTS == 2**48
    as_shape((2**24, 2**24))
    with pytest.raises(SizeError):
        as_shape((2**24, 2**24, 2))


def test_dense_tensor_values_are_column_major():
    T = DenseTensor.from_values((2, 3), np.arange(6))
    assert T[1, 0] == 1 and T[0, 1] == 2
    np.testing.assert_array_equal(T.values, np.arange(6))


def test_dense_tensor_is_immutable():
    src = np.zeros((2, 2))
    T = DenseTensor(src)
    src[0, 0] = 5.0
    assert T[0, 0] == 0.0
    with pytest.raises(ValueError):
        T.data[0, 0] = 1.0


def test_from_values_length_mismatch():
    with pytest.raises(DimensionError):
        DenseTensor.from_values((2, 2), [1, 2, 3])


# -- tensorize / untensorize ----------------------------------------------------

def test_tensorize_8x8_gives_six_way_tensor():
    M = np.arange(64.0).reshape(8, 8)
    T = tensorize(M, (2, 2, 2), (2, 2, 2))
    assert T.shape == (2,) * 6
    np.testing.assert_array_equal(untensorize(T, 3).data, M)


def test_tensorize_scalar_matrix():
    T = tensorize([[7.5]], (1,), (1,))
    assert T.shape == (1, 1) and T[0, 0] == 7.5


def test_tensorize_4x2_mixed_radix_by_hand():
    M = np.arange(1.0, 9.0).reshape(4, 2)
    T = tensorize(M, (2, 2), (2,))
    assert T.shape == (2, 2, 2)
    for i1, i2, j in itertools.product(range(2), range(2), range(2)):
        assert T[i1, i2, j] == M[i1 + 2 * i2, j]


def test_tensorize_factor_mismatch():
    with pytest.raises(DimensionError):
        tensorize(np.zeros((4, 2)), (3,), (2,))


def test_untensorize_row_mode_count_range():
    T = DenseTensor(np.zeros((2, 2, 2)))
    for bad in (0, 3):
        with pytest.raises(DimensionError):
            untensorize(T, bad)


def test_untensorize_3x4x5_against_loop(rng):
    X = rng.standard_normal((3, 4, 5))
    M = untensorize(X, 1).data
    assert M.shape == (3, 20)
    for i, j, k in itertools.product(range(3), range(4), range(5)):
        assert M[i, j + 4 * k] == X[i, j, k]


@given(st.lists(st.integers(1, 4), min_size=2, max_size=6), st.data())
def test_tensorize_round_trip_bit_exact(dims, data):
    split = data.draw(st.integers(1, len(dims) - 1))
    rows, cols = math.prod(dims[:split]), math.prod(dims[split:])
    M = data.draw(hnp.arrays(np.float64, (rows, cols),
                             elements=st.floats(-1e6, 1e6, allow_nan=False)))
    T = tensorize(M, dims[:split], dims[split:])
    assert np.array_equal(untensorize(T, split).data, M)


# -- unfold / fold --------------------------------------------------------------

def test_unfold_matrix_mode1_is_identity():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(unfold(M, 1).data, M)


def test_unfold_2x3x4_mode2_against_loop(rng):
    X = rng.standard_normal((2, 3, 4))
    U = unfold(X, 2).data
    assert U.shape == (3, 8)
    for i, j, k in itertools.product(range(2), range(3), range(4)):
        assert U[j, i + 2 * k] == X[i, j, k]


def test_unfold_rank_one_has_one_singular_value(rng):
    a, b, c = rng.standard_normal(3), rng.standard_normal(4), rng.standard_normal(2)
    U = unfold(outer_product([a, b, c]), 1).data
    np.testing.assert_allclose(U, np.outer(a, vec(outer_product([b, c]))), rtol=1e-14)
    s = np.linalg.svd(U, compute_uv=False)
    assert s[1] < 1e-12 * s[0]


def test_unfold_mode_range():
    with pytest.raises(DimensionError):
        unfold(np.zeros((2, 2)), 3)
    with pytest.raises(DimensionError):
        unfold(np.zeros((2, 2)), 0)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=5), st.data())
def test_fold_inverts_unfold(dims, data):
    mode = data.draw(st.integers(1, len(dims)))
    X = np.arange(math.prod(dims), dtype=float).reshape(dims)
    assert np.array_equal(fold(unfold(X, mode), mode, dims).data, X)


# -- products -------------------------------------------------------------------

def test_outer_product_single_vector():
    np.testing.assert_array_equal(outer_product([[1.0, 2.0, 3.0]]).data, [1.0, 2.0, 3.0])


def test_outer_product_indicator():
    T = outer_product([[1.0, 0.0], [0.0, 1.0]]).data
    expected = np.zeros((2, 2))
    expected[0, 1] = 1.0
    np.testing.assert_array_equal(T, expected)


def test_outer_product_triple_loop(rng):
    a, b, c = (rng.standard_normal(3) for _ in range(3))
    T = outer_product([a, b, c])
    for i, j, k in itertools.product(range(3), repeat=3):
        assert T[i, j, k] == a[i] * b[j] * c[k]


def test_products_reject_empty():
    for fn in (outer_product, kronecker):
        with pytest.raises(ValueError):
            fn([])


def test_kronecker_single_factor():
    np.testing.assert_array_equal(kronecker([[1.0, -2.0]]), [1.0, -2.0])


def test_kronecker_declared_order():
    np.testing.assert_array_equal(kronecker([[1.0, 2.0], [3.0, 4.0]]), [3.0, 6.0, 4.0, 8.0])


def test_kronecker_d3_matches_vec_outer(rng):
    vs = [rng.standard_normal(2) for _ in range(3)]
    k = kronecker(vs)
    assert k.size == 8
    for idx in itertools.product(range(2), repeat=3):
        assert k[linear_index(idx, (2, 2, 2))] == vs[0][idx[0]] * vs[1][idx[1]] * vs[2][idx[2]]


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5), st.integers(0, 2**31))
def test_kronecker_equals_vec_outer_product(lengths, seed):
    g = np.random.default_rng(seed)
    vs = [g.standard_normal(n) for n in lengths]
    np.testing.assert_allclose(kronecker(vs), vec(outer_product(vs)), rtol=1e-15, atol=0)


def test_inner_product_examples(rng):
    T = rng.standard_normal((2, 2))
    assert inner_product(T, np.zeros((2, 2))) == 0.0
    e = np.zeros((2, 2))
    e[0, 0] = 1.0
    assert inner_product(e, e) == 1.0
    a, b = rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 3, 2))
    flat = 0.0
    for x, y in zip(a.ravel(), b.ravel()):
        flat += x * y
    assert inner_product(a, b) == pytest.approx(flat, rel=1e-14)


def test_inner_product_shape_mismatch():
    with pytest.raises(DimensionError):
        inner_product(np.zeros((2, 3)), np.zeros((3, 2)))


@given(st.integers(0, 2**31), st.floats(-10, 10))
def test_inner_product_symmetric_bilinear(seed, alpha):
    g = np.random.default_rng(seed)
    a, b, c = (g.standard_normal((3, 2, 2)) for _ in range(3))
    assert inner_product(a, b) == inner_product(b, a)
    lhs = inner_product(alpha * a + c, b)
    rhs = alpha * inner_product(a, b) + inner_product(c, b)
    scale = abs(alpha) * np.abs(a * b).sum() + np.abs(c * b).sum()
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1e-300)
