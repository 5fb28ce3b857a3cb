"""Tensorized kernel ridge regression.

The regression model is ``y_n = <phi(x_n), w>`` where ``phi(x_n)`` is the
Kronecker product of ``D`` per-dimension feature vectors of length ``I``.
Two solvers are provided:

* the dense baseline (:func:`build_phi` + :func:`ridge_direct_solve`) which
  forms the ``N x I^D`` design matrix and the ``I^D x I^D`` normal
  equations, and
* T-KRR (:func:`build_feature_network` + :func:`tkrr_fit`) which keeps each
  sample as a rank-one feature network (``D`` matrices of size ``N x I``)
  and the weights as a rank-``R`` CP decomposition, fitted by alternating
  least squares.

The ALS penalty is the exact ``reg * ||W||_F^2`` of the CP weight tensor.
With all but one factor fixed it is a quadratic form in the active factor,
``vec(B)^T (I_I kron G) vec(B)`` with ``G`` the Hadamard product of the
other factors' Gram matrices, so every factor update is an exact
minimization of the full objective and the recorded objective is
non-increasing.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from . import flops
from .decomp import CPDecomp, cp_reconstruct
from .errors import BaselineInfeasible, DimensionError, SolverError
from .tensor import MAX_ELEMENTS, DenseTensor, as_array

__all__ = [
    "FAMILIES",
    "FeatureMap",
    "Dataset",
    "DenseRidgeModel",
    "FeatureTensorNetwork",
    "FitDiagnostics",
    "TkrrModel",
    "map_scalar",
    "map_column",
    "build_phi",
    "ridge_direct_solve",
    "fit_dense_ridge",
    "build_feature_network",
    "tn_inner_product",
    "tkrr_fit",
    "predict",
    "dense_weights",
]

FAMILIES = ("fourier", "poly")
_FAMILY_ALIASES = {
    "fourier": "fourier",
    "deterministic-fourier": "fourier",
    "poly": "poly",
    "polynomial": "poly",
    "pure-power-polynomial": "poly",
}
JITTER = 1e-10


@dataclass(frozen=True)
class FeatureMap:
    """Per-dimension basis expansion.

    ``fourier``: ``sqrt(2/(u-l)) * sin(pi*i*(x-l)/(u-l))`` for ``i = 1..I``,
    the sine basis of the interval ``[l, u]``.
    ``poly``: ``x**(i-1)`` for ``i = 1..I``.

    Inputs outside ``bounds[d]`` are clipped before mapping.
    """

    family: str
    basis_count: int
    bounds: tuple

    def __post_init__(self):
        family = _FAMILY_ALIASES.get(self.family)
        if family is None:
            raise ValueError(f"unknown basis family {self.family!r}")
        if int(self.basis_count) < 1:
            raise ValueError("basis_count must be >= 1")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise DimensionError("feature map needs at least one dimension")
        for lo, hi in bounds:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"invalid domain bounds ({lo}, {hi})")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "basis_count", int(self.basis_count))
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def uniform(cls, family, basis_count, ndim, lower=0.0, upper=1.0):
        return cls(family, basis_count, ((lower, upper),) * ndim)

    @classmethod
    def from_data(cls, family, basis_count, inputs, margin=0.1):
        """Bounds from the per-column range of ``inputs``, widened by ``margin``."""
        X = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        lo, hi = X.min(axis=0), X.max(axis=0)
        pad = margin * np.where(hi > lo, hi - lo, 1.0)
        return cls(family, basis_count, tuple(zip(lo - pad, hi + pad)))

    @property
    def ndim(self) -> int:
        return len(self.bounds)

    def clip(self, inputs):
        """Clip an ``N x D`` input matrix to the bounds.

        Returns the clipped copy and a boolean mask of rows that changed.
        """
        X = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        if X.shape[1] != self.ndim:
            raise DimensionError(
                f"inputs have {X.shape[1]} columns, feature map expects {self.ndim}")
        if not np.all(np.isfinite(X)):
            raise ValueError("inputs must be finite")
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        Xc = np.clip(X, lo, hi)
        return Xc, np.any(Xc != X, axis=1)

    def to_dict(self) -> dict:
        return {"family": self.family, "basis_count": self.basis_count,
                "bounds": [list(b) for b in self.bounds]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d["basis_count"], tuple(tuple(b) for b in d["bounds"]))


def map_column(fm: FeatureMap, x, dim: int) -> np.ndarray:
    """Map a vector of (already clipped) values of dimension ``dim`` to ``N x I``."""
    x = np.asarray(x, dtype=np.float64).ravel()
    I = fm.basis_count
    N = x.size
    if fm.family == "poly":
        out = np.cumprod(np.column_stack([np.ones(N)] + [x] * (I - 1)), axis=1)
        flops.record(N * (I - 1), 0)
        return out
    lo, hi = fm.bounds[dim]
    width = hi - lo
    t = (x - lo) * (np.pi / width)
    idx = np.arange(1, I + 1)
    out = math.sqrt(2.0 / width) * np.sin(np.outer(t, idx))
    flops.record(N + 2 * N * I, N)
    return out


def map_scalar(fm: FeatureMap, x: float, dim: int) -> np.ndarray:
    """Feature vector of length ``I`` for scalar ``x`` in dimension ``dim``."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("x must be finite")
    if not 0 <= dim < fm.ndim:
        raise DimensionError(f"dim must be in [0, {fm.ndim - 1}], got {dim}")
    lo, hi = fm.bounds[dim]
    return map_column(fm, [min(max(x, lo), hi)], dim)[0]


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        y = np.asarray(self.targets, dtype=np.float64).ravel()
        if X.shape[0] != y.size:
            raise DimensionError(f"{X.shape[0]} input rows but {y.size} targets")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", y)

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def ndim(self) -> int:
        return self.inputs.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.inputs[idx], self.targets[idx])


def _inputs_of(data) -> np.ndarray:
    return data.inputs if isinstance(data, Dataset) else np.atleast_2d(
        np.asarray(data, dtype=np.float64))


def _mapped_features(fm: FeatureMap, data):
    X, clipped = fm.clip(_inputs_of(data))
    return [map_column(fm, X[:, d], d) for d in range(fm.ndim)], int(clipped.sum())


# -- dense baseline -----------------------------------------------------------------

def build_phi(fm: FeatureMap, data, cap: int = MAX_ELEMENTS) -> DenseTensor:
    """Dense ``N x I^D`` design matrix, row ``n`` = Kronecker feature vector.

    Raises
    ------
    BaselineInfeasible
        If ``N * I^D`` exceeds ``cap``.
    """
    X = _inputs_of(data)
    N = X.shape[0]
    M = fm.basis_count ** fm.ndim
    if N * M > cap:
        raise BaselineInfeasible(
            f"baseline-infeasible: design matrix {N} x {M} exceeds cap {cap}",
            elements=N * M, cap=cap)
    feats, _ = _mapped_features(fm, X)
    phi = feats[0]
    for f in feats[1:]:
        # column-major Kronecker per row: earlier dimensions vary fastest
        phi = (f[:, :, None] * phi[:, None, :]).reshape(N, -1)
        flops.record(phi.size, 0)
    return DenseTensor._wrap(phi, cap=max(cap, phi.size))


def _record(cost):
    flops.record(*cost)


def ridge_direct_solve(phi, y, reg: float, cap: int = MAX_ELEMENTS) -> np.ndarray:
    """Solve ``(Phi^T Phi + reg I) w = Phi^T y`` by LU factorization.

    With ``reg = 0`` and a numerically singular Gram matrix the
    minimum-norm least-squares solution is returned instead.

    Raises
    ------
    BaselineInfeasible
        If the ``M x M`` Gram matrix exceeds ``cap`` elements.
    SolverError
        If the factorization produces non-finite weights.
    """
    Phi = as_array(phi)
    y = np.asarray(y, dtype=np.float64).ravel()
    if Phi.ndim != 2 or Phi.shape[0] != y.size:
        raise DimensionError(f"design {Phi.shape} does not match {y.size} targets")
    if reg < 0:
        raise ValueError("regularization must be >= 0")
    if not (np.all(np.isfinite(Phi)) and np.all(np.isfinite(y))):
        raise ValueError("design matrix and targets must be finite")
    M = Phi.shape[1]
    if M * M > cap:
        raise BaselineInfeasible(
            f"baseline-infeasible: normal equations {M} x {M} exceed cap {cap}",
            elements=M * M, cap=cap)
    G = flops.gram(Phi)
    if reg:
        G[np.diag_indices(M)] += reg
        flops.record(0, M)
    b = flops.matvec(Phi.T, y)
    anorm = np.abs(G).sum(axis=0).max()
    with warnings.catch_warnings():
        # exact singularity is handled below through rcond
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(G, check_finite=False)
    _record(flops.lu_cost(M))
    rcond, _ = lapack.dgecon(lu, anorm, norm="1")
    if rcond < np.finfo(float).eps:
        if reg == 0:
            w = np.linalg.lstsq(Phi, y, rcond=None)[0]
            # Golub-Kahan SVD estimate, recorded as half multiplies, half adds
            svd_ops = 4 * Phi.shape[0] * M * M + 8 * M**3
            flops.record(svd_ops // 2, svd_ops // 2)
            return w
        raise SolverError(f"normal equations are singular (rcond={rcond:.3g})",
                          rcond=rcond)
    w = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    lm, la = flops.triangular_solve_cost(M, unit_diagonal=True)
    um, ua = flops.triangular_solve_cost(M)
    flops.record(lm + um, la + ua)
    if not np.all(np.isfinite(w)):
        raise SolverError(f"direct solve produced non-finite weights (rcond={rcond:.3g})",
                          rcond=rcond)
    return w


@dataclass(frozen=True)
class DenseRidgeModel:
    weights: np.ndarray
    feature_map: FeatureMap
    reg: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        expected = self.feature_map.basis_count ** self.feature_map.ndim
        if w.size != expected:
            raise DimensionError(f"dense weights need length {expected}, got {w.size}")
        object.__setattr__(self, "weights", w)

    def parameter_count(self) -> int:
        return self.weights.size


def fit_dense_ridge(fm: FeatureMap, data: Dataset, reg: float,
                    cap: int = MAX_ELEMENTS) -> DenseRidgeModel:
    phi = build_phi(fm, data, cap)
    return DenseRidgeModel(ridge_direct_solve(phi, data.targets, reg, cap), fm, reg)


# -- T-KRR ------------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureTensorNetwork:
    """Rank-one feature networks of all samples: ``features[d][n] = phi(x_{n,d})``."""

    features: tuple
    feature_map: FeatureMap
    clipped: int = 0

    @property
    def n_samples(self) -> int:
        return self.features[0].shape[0]

    @property
    def ndim(self) -> int:
        return len(self.features)

    @property
    def basis_count(self) -> int:
        return self.features[0].shape[1]

    @property
    def storage(self) -> int:
        return sum(f.size for f in self.features)

    def sample_tensor(self, n: int) -> DenseTensor:
        """Explicit ``I x ... x I`` tensor of sample ``n`` (for checking only)."""
        from .tensor import outer_product
        return outer_product([f[n] for f in self.features])


def build_feature_network(fm: FeatureMap, data) -> FeatureTensorNetwork:
    feats, clipped = _mapped_features(fm, data)
    for f in feats:
        f.flags.writeable = False
    return FeatureTensorNetwork(tuple(feats), fm, clipped)


def tn_inner_product(ftn: FeatureTensorNetwork, n: int, w: CPDecomp) -> float:
    """``<P_n, W>`` as ``sum_r weights_r prod_d phi(x_{n,d})^T w_d[:, r]``."""
    if w.ndim != ftn.ndim or any(s != ftn.basis_count for s in w.shape):
        raise DimensionError(
            f"weights of shape {w.shape} do not match {ftn.ndim} dims of size "
            f"{ftn.basis_count}")
    prod = np.ones(w.rank)
    for f, A in zip(ftn.features, w.factors):
        prod = prod * flops.matvec(A.T, f[n])
        flops.record(w.rank, 0)
    return flops.dot(w.weights, prod)


@dataclass
class FitDiagnostics:
    initial_objective: float = float("nan")
    objective: list = field(default_factory=list)
    sweep_objective: list = field(default_factory=list)
    jitter_events: list = field(default_factory=list)
    extrapolations: int = 0
    clip_count: int = 0
    sweeps: int = 0
    converged: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["jitter_events"] = [list(e) for e in self.jitter_events]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class TkrrModel:
    weight_network: CPDecomp
    feature_map: FeatureMap
    reg: float
    diagnostics: FitDiagnostics = field(default_factory=FitDiagnostics, compare=False)

    def __post_init__(self):
        w = self.weight_network
        if w.ndim != self.feature_map.ndim or any(
                s != self.feature_map.basis_count for s in w.shape):
            raise DimensionError("weight network does not match the feature map")

    @property
    def rank(self) -> int:
        return self.weight_network.rank

    def parameter_count(self, table_compatible: bool = False) -> int:
        from .decomp import parameter_count
        return parameter_count(self.weight_network, table_compatible)


def _solve_spd(A: np.ndarray, b: np.ndarray):
    n = A.shape[0]
    jittered = False
    try:
        c, low = scipy.linalg.cho_factor(A, check_finite=False)
        rcond, info = lapack.dpocon(c, np.abs(A).sum(axis=0).max(),
                                    uplo="L" if low else "U")
        if info != 0 or rcond < 1e-14:
            raise np.linalg.LinAlgError("ill-conditioned")
    except np.linalg.LinAlgError:
        jittered = True
        shift = JITTER * max(float(np.trace(A)) / n, 1.0)
        c, low = scipy.linalg.cho_factor(A + shift * np.eye(n), check_finite=False)
        flops.record(0, n)
    _record(flops.cholesky_cost(n))
    x = scipy.linalg.cho_solve((c, low), b, check_finite=False)
    m, a = flops.triangular_solve_cost(n)
    flops.record(2 * m, 2 * a)
    return x, jittered


def _sketch_init(F, y, R, rng):
    """Initial factors spanning the leading mode subspaces of ``Phi^T y``.

    The mode-``d`` unfolding of the ``I^D`` moment tensor ``Phi^T y`` is
    probed with rank-one Gaussian test tensors; each probe costs ``O(NID)``
    and never forms the tensor.
    """
    D = len(F)
    N, I = F[0].shape
    K = min(I, R + 2)
    factors = []
    for d in range(D):
        S = np.empty((I, K))
        for k in range(K):
            h = y
            for e in range(D):
                if e != d:
                    h = h * flops.matvec(F[e], rng.standard_normal(I))
                    flops.record(N, 0)
            S[:, k] = flops.matvec(F[d].T, h)
        U = np.linalg.svd(S, full_matrices=False)[0]
        factors.append(U[:, :R].copy())
    return factors


def _normalize(A, lam):
    norms = np.linalg.norm(A, axis=0)
    live = norms > 0
    out = A.copy()
    out[:, live] = A[:, live] / norms[live]
    return out, np.where(live, lam * norms, 0.0)


def tkrr_fit(ftn: FeatureTensorNetwork, y, rank: int, reg: float,
             sweeps: int = 10, seed: int = 0, tol: float = 1e-8,
             init: str = "sketch", extrapolate: bool = True) -> TkrrModel:
    """Fit CP-parametrized ridge regression weights by ALS.

    Parameters
    ----------
    ftn : FeatureTensorNetwork
        Mapped training inputs.
    y : array_like
        Targets, one per sample.
    rank : int
        CP rank ``R`` of the weight tensor.
    reg : float
        Ridge parameter multiplying ``||W||_F^2``.
    sweeps : int
        Budget of forward sweeps ``d = 1..D``.
    seed : int
        Seeds the initial factors.
    tol : float
        Early stop when a sweep lowers the objective by less than ``tol``
        relative to the previous sweep. ``0`` runs the full budget.
    init : {"sketch", "random"}
        ``random`` draws uniform ``[-1, 1]`` factors. ``sketch`` (used when
        ``R < I`` and ``D > 1``, otherwise falls back to ``random``) starts
        from the leading subspaces of seeded rank-one sketches of
        ``Phi^T y``.
    extrapolate : bool
        After each sweep, try the step ``theta + (theta - theta_prev)``
        and keep it only if it lowers the objective.

    Raises
    ------
    SolverError
        If the objective stops being finite, e.g. when targets overflow.

    Each factor update assembles the ``N x IR`` design ``Z`` with
    ``Z[n, (i, r)] = phi(x_{n,d})_i * prod_{e != d} phi(x_{n,e})^T a_{e,r}``
    and solves ``(Z^T Z + reg * (I kron G)) vec(B) = Z^T y``; the cost is
    ``O(N (IR)^2 + (IR)^3)`` per factor.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    F = ftn.features
    D, N, I = ftn.ndim, ftn.n_samples, ftn.basis_count
    R = int(rank)
    if R < 1:
        raise ValueError("rank must be >= 1")
    if reg < 0:
        raise ValueError("regularization must be >= 0")
    if init not in ("sketch", "random"):
        raise ValueError(f"unknown init {init!r}")
    if y.size != N or not np.all(np.isfinite(y)):
        raise DimensionError(f"need {N} finite targets, got {y.size}")

    rng = np.random.default_rng(seed)
    if init == "sketch" and R < I and D > 1:
        A = _sketch_init(F, y, R, rng)
    else:
        A = [rng.uniform(-1.0, 1.0, size=(I, R)) for _ in range(D)]
    A = [_normalize(a, np.ones(R))[0] for a in A]
    lam = np.ones(R)

    def others(d, items, shape):
        # Hadamard product of items[e] for e != d (all of them when d is None)
        picked = [items[e] for e in range(D) if e != d]
        if not picked:
            return np.ones(shape)
        return flops.hadamard(*picked)

    def full_objective(P, G, lam):
        resid = y - flops.matvec(others(None, P, (N, R)), lam)
        penalty = flops.dot(lam, flops.matvec(others(None, G, (R, R)), lam))
        flops.record(1, N + 1)
        return flops.dot(resid, resid) + reg * penalty

    P = [flops.matmul(F[d], A[d]) for d in range(D)]
    G = [flops.gram(A[d]) for d in range(D)]
    diag = FitDiagnostics(clip_count=ftn.clipped)
    diag.initial_objective = float(full_objective(P, G, lam))
    if not np.isfinite(diag.initial_objective):
        raise SolverError("initial objective is not finite (targets or features overflow)")
    eye_I = np.eye(I)
    previous = diag.initial_objective
    prev_theta = None
    for sweep in range(sweeps):
        # suffix[d] = prod_{e > d} P[e]; the running prefix covers e < d
        suffix = [None] * D
        suffix[D - 1] = np.ones((N, R))
        for d in range(D - 2, -1, -1):
            suffix[d] = P[d + 1] if d == D - 2 else flops.hadamard(P[d + 1], suffix[d + 1])
        prefix = None
        for d in range(D):
            if prefix is None:
                H = suffix[d]
            elif d == D - 1:
                H = prefix
            else:
                H = flops.hadamard(prefix, suffix[d])
            Gm = others(d, G, (R, R))
            Z = (F[d][:, :, None] * H[:, None, :]).reshape(N, I * R)
            flops.record(N * I * R, 0)
            system = flops.gram(Z)
            if reg:
                system += reg * np.kron(eye_I, Gm)
                flops.record(I * R * R, I * R * R)
            rhs = flops.matvec(Z.T, y)
            sol, jittered = _solve_spd(system, rhs)
            if jittered:
                diag.jitter_events.append((sweep, d))
            B = sol.reshape(I, R)
            Q = flops.matmul(F[d], B)
            resid = y - flops.matvec(flops.hadamard(Q, H), np.ones(R))
            BtB = flops.gram(B)
            objective = flops.dot(resid, resid) + reg * float(np.sum(Gm * BtB))
            flops.record(R * R + 1, N + R * R)
            if not np.isfinite(objective):
                raise SolverError(f"non-finite objective in sweep {sweep}, factor {d}")
            current = diag.objective[-1] if diag.objective else diag.initial_objective
            if jittered and objective > current:
                # the shifted system is not the exact subproblem; keep the old factor
                diag.objective.append(current)
            else:
                diag.objective.append(float(objective))
                A[d], lam = _normalize(B, np.ones(R))
                live = lam > 0
                P[d] = np.zeros((N, R))
                P[d][:, live] = Q[:, live] / lam[live]
                flops.record(N * int(live.sum()), 0)
                G[d] = flops.gram(A[d])
            if d < D - 1:
                prefix = P[d] if prefix is None else flops.hadamard(prefix, P[d])

        if extrapolate and prev_theta is not None:
            cand_lam = 2.0 * lam - prev_theta[1]
            cand_A = []
            for a, a_prev in zip(A, prev_theta[0]):
                a, cand_lam = _normalize(2.0 * a - a_prev, cand_lam)
                cand_A.append(a)
            flops.record(2 * D * I * R + R, D * I * R + R)
            cand_P = [flops.matmul(F[d], cand_A[d]) for d in range(D)]
            cand_G = [flops.gram(cand_A[d]) for d in range(D)]
            cand_obj = full_objective(cand_P, cand_G, cand_lam)
            if cand_obj < diag.objective[-1]:
                A, lam, P, G = cand_A, cand_lam, cand_P, cand_G
                diag.objective.append(float(cand_obj))
                diag.extrapolations += 1
        prev_theta = ([a.copy() for a in A], lam.copy())

        diag.sweeps = sweep + 1
        current = diag.objective[-1]
        diag.sweep_objective.append(current)
        if tol > 0 and previous - current <= tol * max(abs(previous), np.finfo(float).tiny):
            diag.converged = True
            break
        previous = current

    return TkrrModel(CPDecomp(lam, A), ftn.feature_map, float(reg), diag)


def predict(model, inputs, return_clipped: bool = False):
    """Predictions ``<phi(x), w>`` for each row of ``inputs``.

    ``return_clipped=True`` also returns a boolean mask of rows that were
    clipped to the feature-map bounds.
    """
    fm = model.feature_map
    X = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if X.shape[1] != fm.ndim:
        raise DimensionError(f"model expects {fm.ndim} input columns, got {X.shape[1]}")
    Xc, clipped = fm.clip(X)
    if isinstance(model, TkrrModel):
        w = model.weight_network
        prod = np.ones((X.shape[0], w.rank))
        for d in range(fm.ndim):
            prod *= flops.matmul(map_column(fm, Xc[:, d], d), w.factors[d])
        yhat = flops.matvec(prod, w.weights)
    elif isinstance(model, DenseRidgeModel):
        yhat = flops.matvec(build_phi(fm, Xc).data, model.weights)
    else:
        raise TypeError(f"cannot predict with {type(model).__name__}")
    return (yhat, clipped) if return_clipped else yhat


def dense_weights(model: TkrrModel) -> np.ndarray:
    """Column-major vectorization of the CP weight tensor (length ``I^D``)."""
    return cp_reconstruct(model.weight_network).values
