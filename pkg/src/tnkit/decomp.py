"""CP, Tucker and tensor-train decompositions.

Each network is a small dataclass holding its components, with exact
reconstruction to a :class:`~tnkit.tensor.DenseTensor`, a stored-scalar
count, and a fitter that minimizes ``||X - X_hat||_F`` over networks of the
given rank:

* :func:`cp_fit` -- alternating least squares on the factor matrices,
* :func:`hosvd_fit` -- truncated higher-order SVD,
* :func:`tt_svd_fit` -- sequential truncated SVDs with an error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, RankError
from .tensor import DenseTensor, as_array, unfold

__all__ = [
    "CPDecomp",
    "TuckerDecomp",
    "TTDecomp",
    "cp_reconstruct",
    "tucker_reconstruct",
    "tt_reconstruct",
    "reconstruct",
    "cp_to_tucker",
    "cp_fit",
    "hosvd_fit",
    "tt_svd_fit",
    "parameter_count",
    "random_cp",
    "random_tucker",
    "random_tt",
]

JITTER = 1e-10


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class CPDecomp:
    """Weighted sum of ``R`` rank-one terms.

    ``factors[d]`` has shape ``(I_d, R)``; entry ``(i_1, ..., i_D)`` of the
    represented tensor is ``sum_r weights[r] * prod_d factors[d][i_d, r]``.
    """

    weights: np.ndarray
    factors: tuple
    fit_info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        weights = _frozen(self.weights).ravel()
        factors = tuple(_frozen(f) for f in self.factors)
        if not factors:
            raise DimensionError("CP decomposition needs at least one factor")
        R = weights.size
        if R < 1:
            raise RankError("CP rank must be >= 1")
        for d, f in enumerate(factors):
            if f.ndim != 2 or f.shape[1] != R or f.shape[0] < 1:
                raise DimensionError(
                    f"factor {d} has shape {f.shape}, expected (I_{d + 1}, {R})")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self) -> int:
        return self.weights.size

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    @property
    def ndim(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class TuckerDecomp:
    """Core tensor multiplied along every mode by a factor matrix."""

    core: np.ndarray
    factors: tuple

    def __post_init__(self):
        core = _frozen(as_array(self.core))
        factors = tuple(_frozen(f) for f in self.factors)
        if core.ndim != len(factors) or not factors:
            raise DimensionError(
                f"core has {core.ndim} modes but {len(factors)} factors given")
        for d, (f, r) in enumerate(zip(factors, core.shape)):
            if f.ndim != 2 or f.shape[1] != r:
                raise DimensionError(
                    f"factor {d} has shape {f.shape}, core mode size is {r}")
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "factors", factors)

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.core.shape

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)


@dataclass(frozen=True)
class TTDecomp:
    """Tensor train: cores of shape ``(R_d, I_d, R_{d+1})``, ``R_1 = R_{D+1} = 1``."""

    cores: tuple

    def __post_init__(self):
        cores = tuple(_frozen(c) for c in self.cores)
        if not cores:
            raise DimensionError("TT decomposition needs at least one core")
        for d, c in enumerate(cores):
            if c.ndim != 3:
                raise DimensionError(f"core {d} must be three-way, got {c.shape}")
        if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
            raise RankError("boundary TT ranks must be 1")
        for d in range(len(cores) - 1):
            if cores[d].shape[2] != cores[d + 1].shape[0]:
                raise RankError(
                    f"cores {d} and {d + 1} disagree on the shared rank")
        object.__setattr__(self, "cores", cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        """All D+1 ranks including the two boundary ones."""
        return tuple(c.shape[0] for c in self.cores) + (1,)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)


# -- reconstruction -------------------------------------------------------------

def cp_reconstruct(d: CPDecomp) -> DenseTensor:
    # accumulate (I_1, ..., I_k, R) and sum the rank axis at the end
    acc = d.factors[0] * d.weights
    for f in d.factors[1:]:
        acc = acc[..., None, :] * f
    return DenseTensor(acc.sum(axis=-1))


def tucker_reconstruct(d: TuckerDecomp) -> DenseTensor:
    out = d.core
    for mode, f in enumerate(d.factors):
        out = np.moveaxis(np.tensordot(out, f, axes=(mode, 1)), -1, mode)
    return DenseTensor(out)


def tt_reconstruct(d: TTDecomp) -> DenseTensor:
    out = d.cores[0][0]  # (I_1, R_2)
    for core in d.cores[1:]:
        out = np.tensordot(out, core, axes=(-1, 0))
    return DenseTensor(out[..., 0])


def reconstruct(d) -> DenseTensor:
    if isinstance(d, CPDecomp):
        return cp_reconstruct(d)
    if isinstance(d, TuckerDecomp):
        return tucker_reconstruct(d)
    if isinstance(d, TTDecomp):
        return tt_reconstruct(d)
    raise TypeError(f"not a decomposition: {type(d).__name__}")


def cp_to_tucker(d: CPDecomp) -> TuckerDecomp:
    """Embed a CP decomposition as Tucker with a superdiagonal core."""
    R = d.rank
    core = np.zeros((R,) * d.ndim)
    core[(np.arange(R),) * d.ndim] = d.weights
    return TuckerDecomp(core, d.factors)


def parameter_count(d, table_compatible: bool = False) -> int:
    """Number of stored scalars.

    With ``table_compatible=True`` the CP weight vector is left out, giving
    ``R * sum_d I_d`` (``R*I*D`` for equal mode sizes) as in the usual
    runtime/parameter tables. The flag has no effect on Tucker and TT.
    """
    if isinstance(d, CPDecomp):
        factor_entries = d.rank * sum(d.shape)
        return factor_entries if table_compatible else d.rank + factor_entries
    if isinstance(d, TuckerDecomp):
        return math.prod(d.ranks) + sum(i * r for i, r in zip(d.shape, d.ranks))
    if isinstance(d, TTDecomp):
        return sum(math.prod(c.shape) for c in d.cores)
    if hasattr(d, "parameter_count"):
        return d.parameter_count()
    raise TypeError(f"not a decomposition: {type(d).__name__}")


# -- fitting --------------------------------------------------------------------

def _mttkrp(X: np.ndarray, factors, mode: int) -> np.ndarray:
    D = X.ndim
    operands = [X, list(range(D))]
    for k, f in enumerate(factors):
        if k != mode:
            operands += [f, [k, D]]
    return np.einsum(*operands, [mode, D], optimize=True)


def _spd_solve(V: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, bool]:
    """Solve ``V x = rhs`` for symmetric PSD ``V``; jitter the diagonal if needed."""
    try:
        if np.linalg.cond(V) < 1e14:
            return scipy.linalg.cho_solve(scipy.linalg.cho_factor(V), rhs), False
    except np.linalg.LinAlgError:
        pass
    Vj = V + JITTER * np.eye(V.shape[0])
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(Vj), rhs), True
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(Vj, rhs, rcond=None)[0], True


def cp_fit(target, rank: int, seed: int, max_sweeps: int = 500,
           tol: float = 1e-10) -> CPDecomp:
    """Fit a rank-``rank`` CP decomposition by alternating least squares.

    Parameters
    ----------
    target : array_like or DenseTensor
        Tensor to approximate.
    rank : int
        Number of rank-one terms, ``>= 1``. Ranks above what the target
        needs are allowed.
    seed : int
        Seed for the uniform ``[-1, 1]`` initial factors.
    max_sweeps : int
        Upper bound on full passes over the modes.
    tol : float
        Stop once a sweep improves the relative error by less than this.

    Returns
    -------
    CPDecomp
        ``fit_info`` holds ``errors`` (relative Frobenius error after each
        sweep), ``sweeps``, ``converged`` and ``jitter_events`` (list of
        ``(sweep, mode)`` pairs where the normal equations needed a
        ``1e-10`` diagonal shift).
    """
    X = as_array(target)
    if X.size == 0:
        raise DimensionError("target is empty")
    rank = int(rank)
    if rank < 1:
        raise RankError("CP rank must be >= 1")
    rng = np.random.default_rng(seed)
    factors = [rng.uniform(-1.0, 1.0, size=(n, rank)) for n in X.shape]
    for f in factors:
        f /= np.linalg.norm(f, axis=0)
    normX = float(np.linalg.norm(X))
    if normX == 0.0:
        info = {"errors": [0.0], "sweeps": 0, "converged": True, "jitter_events": []}
        return CPDecomp(np.zeros(rank), factors, fit_info=info)

    weights = np.ones(rank)
    grams = [f.T @ f for f in factors]
    errors: list[float] = []
    jitter_events = []
    converged = False
    for sweep in range(max_sweeps):
        for mode in range(X.ndim):
            V = np.ones((rank, rank))
            for k, g in enumerate(grams):
                if k != mode:
                    V *= g
            M = _mttkrp(X, factors, mode)
            B, jittered = _spd_solve(V, M.T)
            B = B.T
            if jittered:
                jitter_events.append((sweep, mode))
            norms = np.linalg.norm(B, axis=0)
            live = norms > 0
            factors[mode][:, live] = B[:, live] / norms[live]
            weights = np.where(live, norms, 0.0)
            grams[mode] = factors[mode].T @ factors[mode]
        approx = cp_reconstruct(CPDecomp(weights, factors)).data
        errors.append(float(np.linalg.norm(X - approx)) / normX)
        if errors[-1] == 0.0 or (len(errors) > 1 and errors[-2] - errors[-1] < tol):
            converged = True
            break
    info = {"errors": errors, "sweeps": len(errors), "converged": converged,
            "jitter_events": jitter_events}
    return CPDecomp(weights, factors, fit_info=info)


def hosvd_fit(target, ranks: Sequence[int]) -> TuckerDecomp:
    """Truncated higher-order SVD.

    Factor ``d`` holds the leading ``ranks[d]`` left singular vectors of the
    mode-``d`` unfolding; the core is the target projected onto them.
    """
    X = as_array(target)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != X.ndim:
        raise DimensionError(f"need {X.ndim} ranks, got {len(ranks)}")
    factors = []
    for d, (n, r) in enumerate(zip(X.shape, ranks)):
        if not 1 <= r <= n:
            raise RankError(f"rank {r} for mode {d + 1} must be in [1, {n}]")
        U, _, _ = np.linalg.svd(unfold(X, d + 1).data, full_matrices=True)
        factors.append(U[:, :r])
    core = X
    for mode, f in enumerate(factors):
        core = np.moveaxis(np.tensordot(core, f, axes=(mode, 0)), -1, mode)
    return TuckerDecomp(core, factors)


def _truncation_rank(s: np.ndarray, delta: float, shape) -> int:
    if delta == 0.0:
        # lossless mode keeps the numerical rank
        if s.size == 0 or s[0] == 0.0:
            return 1
        return max(int(np.sum(s > s[0] * max(shape) * np.finfo(float).eps)), 1)
    # tails[r] = ||s[r:]||, smallest r with tails[r] <= delta
    tails = np.sqrt(np.cumsum((s**2)[::-1]))[::-1]
    tails = np.append(tails, 0.0)
    r = int(np.argmax(tails <= delta))
    return max(r, 1)


def tt_svd_fit(target, max_ranks=None, eps: float | None = None) -> TTDecomp:
    """TT-SVD: left-to-right truncated SVDs of successive unfoldings.

    Parameters
    ----------
    max_ranks : int or sequence of D-1 ints, optional
        Caps on the internal ranks ``R_2 ... R_D``.
    eps : float, optional
        Relative accuracy. Each of the ``D-1`` truncations discards at most
        ``eps * ||X||_F / sqrt(D-1)`` so that ``||X - X_hat||_F <= eps ||X||_F``.
        With ``eps = 0`` (or neither argument given) only singular values
        below the numerical-rank threshold are dropped.
    """
    X = as_array(target)
    dims = X.shape
    D = X.ndim
    if max_ranks is None:
        caps = [None] * (D - 1)
    elif np.isscalar(max_ranks):
        caps = [int(max_ranks)] * (D - 1)
    else:
        caps = [int(r) for r in max_ranks]
        if len(caps) != D - 1:
            raise DimensionError(f"need {D - 1} internal ranks, got {len(caps)}")
    if any(c is not None and c < 1 for c in caps):
        raise RankError("TT ranks must be >= 1")
    if eps is not None and eps < 0:
        raise ValueError("eps must be >= 0")
    delta = 0.0
    if eps is not None and D > 1:
        delta = eps * float(np.linalg.norm(X)) / math.sqrt(D - 1)

    cores = []
    r_prev = 1
    C = X
    for k in range(D - 1):
        C = C.reshape((r_prev * dims[k], -1), order="F")
        U, s, Vt = np.linalg.svd(C, full_matrices=False)
        r = _truncation_rank(s, delta, C.shape)
        if caps[k] is not None:
            r = min(r, caps[k])
        cores.append(U[:, :r].reshape((r_prev, dims[k], r), order="F"))
        C = s[:r, None] * Vt[:r]
        r_prev = r
    cores.append(C.reshape((r_prev, dims[-1], 1), order="F"))
    return TTDecomp(cores)


# -- random instances -------------------------------------------------------------

def random_cp(dims, rank, seed=None) -> CPDecomp:
    rng = np.random.default_rng(seed)
    return CPDecomp(rng.standard_normal(rank),
                    [rng.standard_normal((n, rank)) for n in dims])


def random_tucker(dims, ranks, seed=None, orthonormal=False) -> TuckerDecomp:
    rng = np.random.default_rng(seed)
    factors = []
    for n, r in zip(dims, ranks):
        f = rng.standard_normal((n, r))
        if orthonormal:
            f = np.linalg.qr(f)[0][:, :r]
        factors.append(f)
    return TuckerDecomp(rng.standard_normal(tuple(ranks)), factors)


def random_tt(dims, ranks, seed=None) -> TTDecomp:
    """``ranks`` lists the D-1 internal ranks."""
    rng = np.random.default_rng(seed)
    full = (1, *ranks, 1)
    return TTDecomp([rng.standard_normal((full[d], n, full[d + 1]))
                     for d, n in enumerate(dims)])
