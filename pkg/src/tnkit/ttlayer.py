"""Fully-connected layer with tensor-train weights.

The weight matrix ``W`` of shape ``(prod I_d) x (prod J_d)`` is stored as
four-way cores ``G_d`` of shape ``(R_d, I_d, J_d, R_{d+1})`` with
``W[(i_1..i_D), (j_1..j_D)] = G_1[:, i_1, j_1, :] @ ... @ G_D[:, i_D, j_D, :]``.
Row and column multi-indices are linearized column-major. Bias terms are
not modelled.

The forward pass contracts the input with one core at a time and never
forms ``W``. The backward pass reuses the forward intermediates (the left
partial contractions) and a right-to-left sweep over the upstream gradient.
Memory is dominated by the cached intermediates, ``O(R max(I^D, J^D))``
per core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import flops
from .decomp import tt_svd_fit
from .errors import DimensionError, RankError, SizeError, TrainingError
from .tensor import MAX_ELEMENTS, DenseTensor, as_array, as_shape

__all__ = [
    "TTLayer",
    "LayerGradients",
    "tt_layer_forward",
    "tt_layer_forward_batch",
    "tt_layer_backward",
    "compress_dense_layer",
    "init_factorized_layer",
    "train_factorized",
    "dense_forward",
]

DIVERGENCE_LOSS = 1e12


@dataclass(frozen=True)
class TTLayer:
    cores: tuple

    def __post_init__(self):
        cores = []
        for c in self.cores:
            arr = np.array(c, dtype=np.float64)
            arr.flags.writeable = False
            cores.append(arr)
        if not cores:
            raise DimensionError("a TT layer needs at least one core")
        for d, c in enumerate(cores):
            if c.ndim != 4:
                raise DimensionError(f"core {d} must be four-way, got {c.shape}")
        if cores[0].shape[0] != 1 or cores[-1].shape[3] != 1:
            raise RankError("boundary TT ranks must be 1")
        for d in range(len(cores) - 1):
            if cores[d].shape[3] != cores[d + 1].shape[0]:
                raise RankError(f"cores {d} and {d + 1} disagree on the shared rank")
        object.__setattr__(self, "cores", tuple(cores))

    @property
    def ndim(self) -> int:
        return len(self.cores)

    @property
    def input_shape(self) -> tuple[int, ...]:
        return tuple(c.shape[2] for c in self.cores)

    @property
    def output_shape(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.cores) + (1,)

    def parameter_count(self) -> int:
        return sum(c.size for c in self.cores)

    def dense_parameter_count(self) -> int:
        return math.prod(self.output_shape) * math.prod(self.input_shape)

    def to_dense(self, cap: int = MAX_ELEMENTS) -> np.ndarray:
        """Reconstruct the ``prod(I) x prod(J)`` weight matrix."""
        rows, cols = math.prod(self.output_shape), math.prod(self.input_shape)
        if rows * cols > cap:
            raise SizeError(f"dense weight {rows} x {cols} exceeds cap {cap}")
        T = self.cores[0][0]  # (I_1, J_1, R_2)
        for core in self.cores[1:]:
            T = np.tensordot(T, core, axes=(-1, 0))
        T = T[..., 0]  # axes i_1, j_1, i_2, j_2, ...
        D = self.ndim
        T = T.transpose(list(range(0, 2 * D, 2)) + list(range(1, 2 * D, 2)))
        return T.reshape((rows, cols), order="F")

    def with_cores(self, cores) -> "TTLayer":
        return TTLayer(tuple(cores))


@dataclass(frozen=True)
class LayerGradients:
    core_grads: tuple
    input_grad: np.ndarray


# axis labels for flops.contract: batch, output modes, input modes, ranks
def _labels(D):
    i = [1 + e for e in range(D)]
    j = [1 + D + e for e in range(D)]
    r = [1 + 2 * D + e for e in range(D + 1)]
    return 0, i, j, r


def _as_batch(layer: TTLayer, x) -> np.ndarray:
    X = as_array(x)
    J = layer.input_shape
    if X.shape == J:
        return X[None]
    if X.ndim == len(J) + 1 and X.shape[1:] == J:
        return X
    if X.ndim == 2 and X.shape[1] == math.prod(J):
        return X.reshape((X.shape[0],) + J, order="F")
    raise DimensionError(f"input of shape {X.shape} does not match {J}")


def _forward(layer: TTLayer, X: np.ndarray, keep: bool):
    D = layer.ndim
    b, i, j, r = _labels(D)
    S = X[:, None]
    axes = [b, r[0]] + j
    cache = []
    for d, core in enumerate(layer.cores):
        if keep:
            cache.append((S, axes))
        out_axes = [b] + i[: d + 1] + [r[d + 1]] + j[d + 1:]
        S = flops.contract(S, axes, core, [r[d], i[d], j[d], r[d + 1]], out_axes)
        axes = out_axes
    return S[..., 0], cache


def tt_layer_forward_batch(layer: TTLayer, X) -> np.ndarray:
    """Apply the layer to a batch; returns shape ``(B, I_1, ..., I_D)``."""
    return _forward(layer, _as_batch(layer, X), keep=False)[0]


def tt_layer_forward(layer: TTLayer, x) -> DenseTensor:
    """Matrix-vector product ``W x`` in tensor form, ``x`` of shape ``(J_1..J_D)``."""
    X = as_array(x)
    if X.shape != layer.input_shape:
        raise DimensionError(f"input of shape {X.shape} does not match {layer.input_shape}")
    return DenseTensor._wrap(_forward(layer, X[None], keep=False)[0][0])


def tt_layer_backward(layer: TTLayer, x, upstream_grad) -> LayerGradients:
    """Gradients of ``sum <upstream_grad, forward(x)>`` w.r.t. cores and input.

    ``x`` may be a single input of shape ``input_shape`` or a batch; the
    upstream gradient must have the matching output shape. Core gradients
    are summed over the batch.
    """
    single = as_array(x).shape == layer.input_shape
    X = _as_batch(layer, x)
    Gup = as_array(upstream_grad)
    if single:
        Gup = Gup[None]
    if Gup.shape != (X.shape[0],) + layer.output_shape:
        raise DimensionError(
            f"upstream gradient of shape {as_array(upstream_grad).shape} does not "
            f"match output shape {layer.output_shape}")
    D = layer.ndim
    b, i, j, r = _labels(D)
    _, cache = _forward(layer, X, keep=True)

    V = Gup[..., None]
    v_axes = [b] + i + [r[D]]
    grads = [None] * D
    for d in range(D - 1, -1, -1):
        S, s_axes = cache[d]
        core_axes = [r[d], i[d], j[d], r[d + 1]]
        grads[d] = flops.contract(S, s_axes, V, v_axes, core_axes)
        out_axes = [b] + i[:d] + [r[d]] + j[d:]
        V = flops.contract(V, v_axes, layer.cores[d], core_axes, out_axes)
        v_axes = out_axes
    input_grad = V[:, 0]
    return LayerGradients(tuple(grads), input_grad[0] if single else input_grad)


def dense_forward(W, X) -> np.ndarray:
    """Counted dense matvec ``W x`` for each row of ``X`` (flattened inputs)."""
    X = np.atleast_2d(as_array(X))
    return flops.matmul(X, np.asarray(W).T)


def compress_dense_layer(W, row_factors, col_factors, max_ranks=None,
                         eps: float | None = None) -> TTLayer:
    """Compress a dense weight matrix into a TT layer via TT-SVD.

    The matrix is tensorized to ``(I_1..I_D, J_1..J_D)``, its modes are
    interleaved as ``(I_1 J_1, I_2 J_2, ...)`` and decomposed; each TT core
    is then split back into ``(R_d, I_d, J_d, R_{d+1})``. Kronecker products
    of small matrices therefore compress to rank 1.
    """
    M = as_array(W)
    I = as_shape(row_factors)
    J = as_shape(col_factors)
    if M.ndim != 2 or math.prod(I) != M.shape[0] or math.prod(J) != M.shape[1]:
        raise DimensionError(f"factors {I} x {J} do not match matrix shape {M.shape}")
    if len(I) != len(J):
        raise DimensionError("row and column factorizations need the same length")
    D = len(I)
    T = M.reshape(I + J, order="F")
    perm = [a for d in range(D) for a in (d, D + d)]
    paired = T.transpose(perm).reshape([I[d] * J[d] for d in range(D)], order="F")
    tt = tt_svd_fit(paired, max_ranks=max_ranks, eps=eps)
    cores = [c.reshape((c.shape[0], I[d], J[d], c.shape[2]), order="F")
             for d, c in enumerate(tt.cores)]
    return TTLayer(tuple(cores))


def init_factorized_layer(input_shape, output_shape, ranks, seed) -> TTLayer:
    """Random TT layer with ``N(0, 1/(R_d J_d))`` core entries.

    With this scaling ``E[W_ij^2] = 1 / prod(J)``, so unit-variance inputs
    give outputs of unit variance in expectation.
    """
    J = as_shape(input_shape)
    I = as_shape(output_shape)
    if len(I) != len(J):
        raise DimensionError("input and output shapes need the same length")
    D = len(I)
    if np.isscalar(ranks):
        ranks = [int(ranks)] * (D - 1)
    ranks = [int(r) for r in ranks]
    if len(ranks) != D - 1 or any(r < 1 for r in ranks):
        raise RankError(f"need {D - 1} internal ranks >= 1, got {ranks}")
    full = [1] + ranks + [1]
    rng = np.random.default_rng(seed)
    cores = [rng.standard_normal((full[d], I[d], J[d], full[d + 1]))
             / math.sqrt(full[d] * J[d]) for d in range(D)]
    return TTLayer(tuple(cores))


def train_factorized(layer: TTLayer, inputs, targets, steps: int, step_size: float,
                     seed: int = 0, batch_size: int | None = None):
    """Gradient descent on ``0.5 * mean_n ||forward(x_n) - t_n||^2``.

    Full-batch by default; with ``batch_size`` each step draws a minibatch
    with a generator seeded by ``seed``.

    Returns
    -------
    layer : TTLayer
        The trained layer.
    losses : list of float
        Full-data loss before the first step and after every step.

    Raises
    ------
    TrainingError
        If the loss exceeds ``1e12`` or becomes non-finite.
    """
    if step_size < 0:
        raise ValueError("step_size must be >= 0")
    X = _as_batch(layer, inputs)
    Tg = as_array(targets)
    if Tg.shape != (X.shape[0],) + layer.output_shape:
        Tg = Tg.reshape((X.shape[0],) + layer.output_shape, order="F")
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    cores = [c.copy() for c in layer.cores]

    def loss_of(current):
        resid = tt_layer_forward_batch(current, X) - Tg
        return 0.5 * float(np.sum(resid**2)) / n

    current = layer
    losses = [loss_of(current)]
    for step in range(steps):
        idx = rng.choice(n, size=batch_size, replace=False) if batch_size else slice(None)
        Xb, Tb = X[idx], Tg[idx]
        nb = Xb.shape[0]
        upstream = (tt_layer_forward_batch(current, Xb) - Tb) / nb
        grads = tt_layer_backward(current, Xb, upstream).core_grads
        for c, g in zip(cores, grads):
            c -= step_size * g
        current = TTLayer(tuple(cores))
        losses.append(loss_of(current))
        if not np.isfinite(losses[-1]) or losses[-1] > DIVERGENCE_LOSS:
            raise TrainingError(f"training diverged at step {step} (loss {losses[-1]:.3g})",
                                step=step)
    return current, losses
