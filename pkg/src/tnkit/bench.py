"""Benchmark commands behind the command-line interface.

Each command takes a :class:`BenchConfig` and returns a
:class:`~tnkit.metrics.Report` (or writes files). FLOPs are counted on a
first, untimed run; the configured number of timed repeats follows.
Timings cover the whole fit, feature mapping included.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import flops
from .data import generate_synthetic, load_csv, train_test_split
from .errors import BaselineInfeasible, ConfigError, DimensionError, RankError
from .metrics import EfficiencyReport, Report, analytic_flops, build_report, time_run
from .storage import load_tensor, save_network
from .tkrr import (Dataset, FeatureMap, build_feature_network, build_phi, predict,
                   ridge_direct_solve, DenseRidgeModel, tkrr_fit)
from .ttlayer import (compress_dense_layer, dense_forward, init_factorized_layer,
                      tt_layer_backward, tt_layer_forward_batch)

__all__ = [
    "DEFAULT_DENSE_CAP",
    "BenchConfig",
    "load_dataset",
    "rmse",
    "cmd_bench_tkrr",
    "cmd_bench_ttlayer",
    "cmd_compress",
    "cmd_gen_synthetic",
    "cmd_fit",
]

# practical cap for benchmark baselines: 2**27 float64 entries = 1 GiB
DEFAULT_DENSE_CAP = 2**27


@dataclass
class BenchConfig:
    """Settings shared by all commands; each command reads what it needs."""

    command: str = "bench-tkrr"
    data: str | None = None
    synthetic: tuple | None = None  # (N, D, noise)
    target_col: str | None = None
    basis: str = "fourier"
    I_grid: tuple = (2, 3)
    D_grid: tuple = (3,)
    J: int | None = None
    rank: tuple = (4,)
    planted_rank: int = 2
    reg: float = 1e-6
    sweeps: int = 10
    tol: float = 0.0
    repeats: int = 3
    seed: int = 0
    batch: int = 1
    dense_cap: int = DEFAULT_DENSE_CAP
    eps: float | None = None
    max_rank: int | None = None
    row_factors: tuple = ()
    col_factors: tuple = ()
    domain: tuple | None = None
    input: str | None = None
    out: str | None = None
    hardware: str = ""
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.I_grid or any(int(i) < 1 for i in self.I_grid):
            raise ConfigError("the I grid must be nonempty with values >= 1")
        if not self.rank or any(int(r) < 1 for r in self.rank):
            raise ConfigError("ranks must be >= 1")
        if not self.D_grid or any(int(d) < 1 for d in self.D_grid):
            raise ConfigError("the D grid must be nonempty with values >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.sweeps < 1:
            raise ConfigError("sweeps must be >= 1")
        if self.reg < 0:
            raise ConfigError("reg must be >= 0")
        if self.dense_cap < 1:
            raise ConfigError("dense cap must be >= 1")
        if self.data and self.synthetic:
            raise ConfigError("give either --data or --synthetic, not both")


def rmse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def load_dataset(cfg: BenchConfig) -> tuple[Dataset, tuple | None]:
    """The configured dataset and its input domain (None: derive from the data)."""
    if cfg.data:
        data, _ = load_csv(cfg.data, cfg.target_col)
        return data, cfg.domain
    if cfg.synthetic:
        N, D, noise = cfg.synthetic
        basis_count = int(max(cfg.I_grid[0], cfg.planted_rank))
        synth = generate_synthetic(int(N), int(D), float(noise), cfg.seed, cfg.basis,
                                   basis_count, cfg.planted_rank)
        return synth.data, (0.0, 1.0)
    raise ConfigError("no dataset: give --data or --synthetic N,D,noise")


def _feature_map(cfg, I, train: Dataset, domain) -> FeatureMap:
    if domain is not None:
        return FeatureMap.uniform(cfg.basis, I, train.ndim, *domain)
    return FeatureMap.from_data(cfg.basis, I, train.inputs)


def _split(cfg, data: Dataset):
    if data.n_samples < 3:
        raise ConfigError("need N >= 3 samples for the train/test split")
    tr, te = train_test_split(data.n_samples, cfg.seed)
    return data.subset(tr), data.subset(te)


def _measure(fn, repeats):
    """Count FLOPs on one untimed run, then time ``repeats`` runs."""
    with flops.flop_scope() as counter:
        result = fn()
    timing = time_run(fn, repeats=repeats)
    return result, counter, timing


def cmd_bench_tkrr(cfg: BenchConfig) -> Report:
    """Dense ridge baseline vs. T-KRR for every ``I`` in the grid.

    Baselines whose design or normal-equation matrix exceeds
    ``cfg.dense_cap`` elements become ``baseline-infeasible`` rows.
    """
    cfg.validate()
    data, domain = load_dataset(cfg)
    train, test = _split(cfg, data)
    D, N = train.ndim, train.n_samples
    rows = []
    for I in (int(i) for i in cfg.I_grid):
        fm = _feature_map(cfg, I, train, domain)
        base_params = I**D
        common = dict(I=I, D=D, N=N, reg=cfg.reg, seed=cfg.seed, hardware=cfg.hardware,
                      baseline_parameters=base_params)
        # the TN column of a baseline row is only defined for a single rank
        base_tn = int(cfg.rank[0]) * I * D if len(cfg.rank) == 1 else None
        M = base_params
        if N * M > cfg.dense_cap or M * M > cfg.dense_cap:
            rows.append(EfficiencyReport(
                algorithm="ridge-direct", R=1, outcome="baseline-infeasible",
                tn_parameters=base_tn, parameter_count=base_params,
                flops_analytic=analytic_flops("ridge-direct", I, D, N), **common))
        else:
            def fit_dense(fm=fm):
                phi = build_phi(fm, train, cap=cfg.dense_cap)
                w = ridge_direct_solve(phi, train.targets, cfg.reg, cap=cfg.dense_cap)
                return DenseRidgeModel(w, fm, cfg.reg)

            try:
                model, counter, timing = _measure(fit_dense, cfg.repeats)
            except BaselineInfeasible:
                rows.append(EfficiencyReport(
                    algorithm="ridge-direct", R=1, outcome="baseline-infeasible",
                    tn_parameters=base_tn, parameter_count=base_params,
                    flops_analytic=analytic_flops("ridge-direct", I, D, N), **common))
            else:
                rows.append(EfficiencyReport(
                    algorithm="ridge-direct", R=1, parameter_count=base_params,
                    tn_parameters=base_tn,
                    flops_analytic=analytic_flops("ridge-direct", I, D, N),
                    accuracy_metric="rmse", accuracy=rmse(predict(model, test.inputs),
                                                          test.targets),
                    **common).with_flops(counter).with_timing(timing))

        for R in (int(r) for r in cfg.rank):
            def fit_tn(fm=fm, R=R):
                ftn = build_feature_network(fm, train)
                return tkrr_fit(ftn, train.targets, R, cfg.reg, sweeps=cfg.sweeps,
                                seed=cfg.seed, tol=cfg.tol)

            model, counter, timing = _measure(fit_tn, cfg.repeats)
            diag = model.diagnostics
            rows.append(EfficiencyReport(
                algorithm="tkrr", R=R, tn_parameters=R * I * D,
                parameter_count=model.parameter_count(),
                flops_analytic=diag.sweeps * analytic_flops("tkrr-als-sweep", I, D, N, R),
                accuracy_metric="rmse",
                accuracy=rmse(predict(model, test.inputs), test.targets),
                extra={"sweeps": diag.sweeps, "converged": diag.converged,
                       "jitter_events": len(diag.jitter_events),
                       "final_objective": diag.objective[-1] if diag.objective else None},
                **common).with_flops(counter).with_timing(timing))
    return build_report(rows, cfg.hardware)


def _dense_backward(W, X, G):
    # the forward is recomputed so the count matches tt_layer_backward, which
    # reruns it to cache intermediates; dL/dW = G^T X, dL/dX = G W
    dense_forward(W, X)
    return flops.matmul(G.T, X), flops.matmul(G, W)


def cmd_bench_ttlayer(cfg: BenchConfig) -> Report:
    """Dense vs. TT layer forward and backward passes on a shape/rank grid."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for D in (int(d) for d in cfg.D_grid):
        for I in (int(i) for i in cfg.I_grid):
            J = int(cfg.J) if cfg.J else I
            for R in (int(r) for r in cfg.rank):
                try:
                    layer = init_factorized_layer((J,) * D, (I,) * D, R, cfg.seed)
                except (DimensionError, RankError) as exc:
                    raise ConfigError(str(exc)) from exc
                X = rng.standard_normal((cfg.batch, J**D))
                G = rng.standard_normal((cfg.batch, I**D))
                dense_params = I**D * J**D
                common = dict(I=I, J=J, D=D, N=cfg.batch, R=R, seed=cfg.seed,
                              hardware=cfg.hardware, baseline_parameters=dense_params,
                              tn_parameters=layer.parameter_count())
                Xt = X.reshape((cfg.batch,) + (J,) * D, order="F")
                Gt = G.reshape((cfg.batch,) + (I,) * D, order="F")

                y_tt, c, t = _measure(lambda: tt_layer_forward_batch(layer, Xt), cfg.repeats)
                y_tt = y_tt.reshape(cfg.batch, -1, order="F")
                fwd = EfficiencyReport(
                    algorithm="tt-forward", parameter_count=layer.parameter_count(),
                    flops_analytic=cfg.batch * analytic_flops("tt-forward", I, D, R=R, J=J),
                    **common).with_flops(c).with_timing(t)
                _, c, t = _measure(lambda: tt_layer_backward(layer, Xt, Gt), cfg.repeats)
                bwd = EfficiencyReport(
                    algorithm="tt-backward", parameter_count=layer.parameter_count(),
                    flops_analytic=cfg.batch * analytic_flops("tt-backward", I, D, R=R, J=J),
                    **common).with_flops(c).with_timing(t)

                if dense_params > cfg.dense_cap:
                    rows += [EfficiencyReport(algorithm=a, outcome="baseline-infeasible",
                                              parameter_count=dense_params, **common)
                             for a in ("dense-forward", "dense-backward")]
                    rows += [fwd, bwd]
                    continue
                W = layer.to_dense(cap=cfg.dense_cap)
                y_d, c, t = _measure(lambda: dense_forward(W, X), cfg.repeats)
                gap = float(np.max(np.abs(y_d - y_tt)))
                dfwd = EfficiencyReport(
                    algorithm="dense-forward", parameter_count=dense_params,
                    flops_analytic=cfg.batch * analytic_flops("dense-matvec", I, D, J=J),
                    **common).with_flops(c).with_timing(t)
                _, c, t = _measure(lambda: _dense_backward(W, X, G), cfg.repeats)
                dbwd = EfficiencyReport(
                    algorithm="dense-backward", parameter_count=dense_params,
                    flops_analytic=cfg.batch * 3 * analytic_flops("dense-matvec", I, D, J=J),
                    **common).with_flops(c).with_timing(t)
                fwd = replace(fwd, accuracy_metric="max-abs-diff", accuracy=gap)
                rows += [dfwd, fwd, dbwd, bwd]
    return build_report(rows, cfg.hardware)


def cmd_compress(cfg: BenchConfig) -> tuple[object, Report]:
    """Compress a dense matrix from a tensor binary file into a TT layer.

    Writes the layer container to ``cfg.out`` when given and returns the
    layer with a one-row report (ranks, relative error, compression ratio).
    """
    if not cfg.input:
        raise ConfigError("compress needs an input tensor file")
    W = np.asarray(load_tensor(cfg.input).data)
    if W.ndim != 2:
        raise ConfigError(f"expected a matrix, got a {W.ndim}-way tensor")
    rows_f, cols_f = tuple(cfg.row_factors), tuple(cfg.col_factors)
    if not rows_f or not cols_f:
        raise ConfigError("compress needs --row-factors and --col-factors")
    if cfg.eps is not None and cfg.eps < 0:
        raise ConfigError("eps must be >= 0")
    try:
        layer = compress_dense_layer(W, rows_f, cols_f, max_ranks=cfg.max_rank, eps=cfg.eps)
    except (DimensionError, RankError) as exc:
        raise ConfigError(str(exc)) from exc
    dense = layer.to_dense()
    norm = float(np.linalg.norm(W))
    err = float(np.linalg.norm(dense - W)) / norm if norm > 0 else float(np.linalg.norm(dense))
    ratio = W.size / layer.parameter_count()
    row = EfficiencyReport(
        algorithm="tt-compress", I=max(rows_f), J=max(cols_f), D=len(rows_f),
        R=max(layer.ranks), hardware=cfg.hardware, baseline_parameters=W.size,
        tn_parameters=layer.parameter_count(), parameter_count=layer.parameter_count(),
        accuracy_metric="relative-error", accuracy=err,
        extra={"ranks": list(layer.ranks), "compression_ratio": ratio,
               "row_factors": list(rows_f), "col_factors": list(cols_f),
               "eps": cfg.eps, "max_rank": cfg.max_rank})
    if cfg.out:
        save_network(cfg.out, layer)
    return layer, build_report([row], cfg.hardware)


def cmd_gen_synthetic(cfg: BenchConfig) -> Dataset:
    if not cfg.synthetic:
        raise ConfigError("gen-synthetic needs --synthetic N,D,noise")
    cfg.data = None
    data, _ = load_dataset(cfg)
    return data


def cmd_fit(cfg: BenchConfig):
    """Fit T-KRR with the first grid values; returns the model and a summary."""
    cfg.validate()
    data, domain = load_dataset(cfg)
    train, test = _split(cfg, data)
    I, R = int(cfg.I_grid[0]), int(cfg.rank[0])
    fm = _feature_map(cfg, I, train, domain)
    model = tkrr_fit(build_feature_network(fm, train), train.targets, R, cfg.reg,
                     sweeps=cfg.sweeps, seed=cfg.seed, tol=cfg.tol)
    summary = {"I": I, "R": R, "D": train.ndim, "N_train": train.n_samples,
               "N_test": test.n_samples,
               "train_rmse": rmse(predict(model, train.inputs), train.targets),
               "test_rmse": rmse(predict(model, test.inputs), test.targets),
               "diagnostics": model.diagnostics.to_dict()}
    return model, summary
