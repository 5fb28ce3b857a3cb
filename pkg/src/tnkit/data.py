"""Dataset ingestion, synthetic planted-model data and train/test splits."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .decomp import CPDecomp
from .errors import ConfigError, FormatError
from .tkrr import Dataset, FeatureMap, TkrrModel, predict

__all__ = [
    "TRAIN_FRACTION",
    "SyntheticData",
    "load_csv",
    "write_csv",
    "generate_synthetic",
    "planted_weights",
    "train_size",
    "train_test_split",
]

TRAIN_FRACTION = (2, 3)


def load_csv(path, target_col=None) -> tuple[Dataset, list[str]]:
    """Read a comma-separated file with a header row.

    The last column is the target unless ``target_col`` names a column
    (by header name or integer position, negative positions allowed).

    Returns
    -------
    data : Dataset
    feature_names : list of str
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise FormatError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    width = len(header)
    if width < 2:
        raise FormatError(f"{path}: need at least one feature column and a target")
    try:
        values = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric entry ({exc})") from exc
    if values.ndim != 2 or values.shape[1] != width:
        raise FormatError(f"{path}: rows do not all have {width} columns")
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: non-finite values")
    t = _target_index(target_col, header)
    keep = [k for k in range(width) if k != t]
    return Dataset(values[:, keep], values[:, t]), [header[k] for k in keep]


def _target_index(target_col, header) -> int:
    width = len(header)
    if target_col is None:
        return width - 1
    if isinstance(target_col, str) and target_col in header:
        return header.index(target_col)
    try:
        k = int(target_col)
    except (TypeError, ValueError):
        raise ConfigError(f"target column {target_col!r} is not in the header") from None
    if not -width <= k < width:
        raise ConfigError(f"target column {k} out of range for {width} columns")
    return k % width


def write_csv(path_or_file, data: Dataset, feature_names=None, target_name="y") -> None:
    """Write features plus target with a header; floats use 17 significant digits."""
    D = data.ndim
    names = list(feature_names) if feature_names else [f"x{d + 1}" for d in range(D)]
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names + [target_name])
        for x, y in zip(data.inputs, data.targets):
            writer.writerow([format(v, ".17g") for v in x] + [format(y, ".17g")])
    finally:
        if own:
            fh.close()


@dataclass(frozen=True)
class SyntheticData:
    data: Dataset
    weights: CPDecomp
    feature_map: FeatureMap


def planted_weights(ndim: int, basis_count: int, rank: int, rng) -> CPDecomp:
    """CP weights with orthonormal factor columns and weights ``0.6**r``.

    Needs ``rank <= basis_count``. Well-separated factors keep the planted
    model identifiable, so ALS at the planted rank recovers it quickly.
    """
    if not 1 <= rank <= basis_count:
        raise ConfigError(f"planted rank must be in [1, {basis_count}], got {rank}")
    factors = [np.linalg.qr(rng.standard_normal((basis_count, rank)))[0]
               for _ in range(ndim)]
    return CPDecomp(0.6 ** np.arange(rank), factors)


def generate_synthetic(n_samples: int, ndim: int, noise: float = 0.0, seed: int = 0,
                       basis: str = "fourier", basis_count: int = 4, rank: int = 2,
                       bounds=(0.0, 1.0)) -> SyntheticData:
    """Planted-model regression data.

    Inputs are uniform on ``bounds`` in every dimension; targets are
    ``<phi(x), W>`` for a seeded planted CP weight ``W`` plus Gaussian noise
    of standard deviation ``noise``. The same arguments always produce the
    same data.
    """
    if n_samples < 1 or ndim < 1:
        raise ConfigError("synthetic data needs N >= 1 and D >= 1")
    if not noise >= 0:
        raise ConfigError("noise level must be >= 0")
    rng = np.random.default_rng(seed)
    lo, hi = float(bounds[0]), float(bounds[1])
    X = rng.uniform(lo, hi, size=(n_samples, ndim))
    fm = FeatureMap.uniform(basis, basis_count, ndim, lo, hi)
    w = planted_weights(ndim, basis_count, rank, rng)
    y = predict(TkrrModel(w, fm, 0.0), X)
    if noise > 0:
        y = y + noise * rng.standard_normal(n_samples)
    return SyntheticData(Dataset(X, y), w, fm)


def train_size(n_samples: int) -> int:
    """``ceil(2N/3)``, exact integer arithmetic."""
    num, den = TRAIN_FRACTION
    return -(-num * n_samples // den)


def train_test_split(n_samples: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded disjoint index sets of sizes ``ceil(2N/3)`` and the remainder."""
    if n_samples < 3:
        raise ConfigError("a train/test split needs N >= 3")
    perm = np.random.default_rng(seed).permutation(n_samples)
    k = train_size(n_samples)
    return np.sort(perm[:k]), np.sort(perm[k:])
