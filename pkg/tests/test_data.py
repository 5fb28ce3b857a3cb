import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tnkit.bench import BenchConfig, cmd_fit
from tnkit.data import (generate_synthetic, load_csv, train_size, train_test_split, write_csv)
from tnkit.errors import ConfigError, FormatError
from tnkit.tkrr import Dataset


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_csv_last_column_target(tmp_path):
    data, names = load_csv(write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n"))
    assert names == ["a", "b"]
    np.testing.assert_array_equal(data.inputs, [[1, 2], [4, 5]])
    np.testing.assert_array_equal(data.targets, [3, 6])


def test_load_csv_target_by_name_and_index(tmp_path):
    path = write(tmp_path, "t,a,b\n1,2,3\n4,5,6\n")
    by_name, names = load_csv(path, "t")
    by_index, _ = load_csv(path, 0)
    assert names == ["a", "b"]
    np.testing.assert_array_equal(by_name.targets, [1, 4])
    np.testing.assert_array_equal(by_index.inputs, by_name.inputs)


def test_load_csv_errors(tmp_path):
    with pytest.raises(FormatError):
        load_csv(write(tmp_path, "a,y\n"))
    with pytest.raises(FormatError):
        load_csv(write(tmp_path, "a,y\n1,x\n"))
    with pytest.raises(FormatError):
        load_csv(write(tmp_path, "a,y\n1,2\n3\n"))
    with pytest.raises(ConfigError):
        load_csv(write(tmp_path, "a,y\n1,2\n"), "missing")
    with pytest.raises(OSError):
        load_csv(tmp_path / "nope.csv")


def test_csv_round_trip_exact(tmp_path, rng):
    data = Dataset(rng.standard_normal((7, 3)), rng.standard_normal(7))
    path = tmp_path / "r.csv"
    write_csv(path, data)
    back, names = load_csv(path)
    assert names == ["x1", "x2", "x3"]
    assert np.array_equal(back.inputs, data.inputs) and np.array_equal(back.targets, data.targets)


def csv_bytes(**kwargs):
    buf = io.StringIO()
    write_csv(buf, generate_synthetic(**kwargs).data)
    return buf.getvalue()


def test_synthetic_same_seed_identical_bytes():
    assert csv_bytes(n_samples=50, ndim=3, noise=0.1, seed=4) == \
        csv_bytes(n_samples=50, ndim=3, noise=0.1, seed=4)
    assert csv_bytes(n_samples=50, ndim=3, seed=4) != csv_bytes(n_samples=50, ndim=3, seed=5)


def test_synthetic_csv_shape():
    lines = csv_bytes(n_samples=100, ndim=3).splitlines()
    assert len(lines) == 101
    assert all(len(line.split(",")) == 4 for line in lines)


def test_synthetic_inputs_in_domain():
    X = generate_synthetic(500, 2, bounds=(-1.0, 3.0), seed=1).data.inputs
    assert X.min() >= -1.0 and X.max() <= 3.0


def test_synthetic_rejects_bad_arguments():
    with pytest.raises(ConfigError):
        generate_synthetic(0, 3)
    with pytest.raises(ConfigError):
        generate_synthetic(10, 3, noise=-1.0)
    with pytest.raises(ConfigError):
        generate_synthetic(10, 3, rank=5, basis_count=4)


@pytest.mark.parametrize("seed", range(5))
def test_noise_free_planted_fit_generalizes(seed):
    # some seeds need more than ten sweeps to converge
    cfg = BenchConfig(command="fit", synthetic=(300, 3, 0.0), I_grid=(4,), rank=(2,),
                      planted_rank=2, reg=1e-10, sweeps=40, seed=seed)
    _, summary = cmd_fit(cfg)
    assert summary["test_rmse"] < 1e-3


def test_split_sizes_examples():
    assert [train_size(n) for n in (3, 4, 5, 6, 300)] == [2, 3, 4, 4, 200]
    with pytest.raises(ConfigError):
        train_test_split(2)


@given(st.integers(3, 2000), st.integers(0, 2**31))
def test_split_partition(N, seed):
    train, test = train_test_split(N, seed)
    assert len(train) == -(-2 * N // 3) and len(train) + len(test) == N
    assert not set(train) & set(test)
    assert np.array_equal(np.sort(np.concatenate([train, test])), np.arange(N))
    a, b = train_test_split(N, seed)
    assert np.array_equal(a, train) and np.array_equal(b, test)
