"""End-to-end acceptance checks, one marked group per criterion.

The summary at the end of a pytest run prints one PASS/FAIL line per
criterion (see ``conftest.py``).
"""

import ast
import time
from pathlib import Path

import numpy as np
import pytest

from tnkit.bench import BenchConfig, cmd_bench_tkrr
from tnkit.data import generate_synthetic
from tnkit.decomp import (cp_reconstruct, random_cp, random_tt, random_tucker, tt_reconstruct,
                          tt_svd_fit, tucker_reconstruct)
from tnkit.metrics import analytic_flops, build_report, parameter_rows
from tnkit.tkrr import (DenseRidgeModel, FeatureMap, build_feature_network, build_phi, predict,
                        ridge_direct_solve, tkrr_fit)
from tnkit.ttlayer import (TTLayer, compress_dense_layer, tt_layer_backward, tt_layer_forward)

from oracles import naive_cp, naive_tt, naive_tucker, rel_err

ROOT = Path(__file__).resolve().parents[1]
acceptance = pytest.mark.acceptance


# -- 1 --------------------------------------------------------------------------

@acceptance(1, "parameter counts for D=8, R=20 are integer-exact")
def test_parameter_columns_exact():
    start = time.perf_counter()
    report = build_report(parameter_rows([2, 3, 4, 10, 20, 40], D=8, R=20))
    cols = [(r.baseline_parameters, r.tn_parameters) for r in report.rows]
    elapsed = time.perf_counter() - start
    assert cols == [(256, 320), (6561, 480), (65536, 640), (100_000_000, 1600),
                    (25_600_000_000, 3200), (6_553_600_000_000, 6400)]
    assert all(type(v) is int for pair in cols for v in pair)
    assert "| 6553600000000 | 6400 |" in report.to_markdown()
    assert elapsed < 1.0


# -- 2 --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def scaling_report():
    cfg = BenchConfig(command="bench-tkrr", synthetic=(2000, 4, 0.0), I_grid=(2, 4, 8, 16),
                      rank=(20,), sweeps=3, tol=0.0, repeats=1, dense_cap=2**25, reg=1e-6)
    start = time.perf_counter()
    report = cmd_bench_tkrr(cfg)
    return report, time.perf_counter() - start


@acceptance(2, "T-KRR FLOPs quadratic in I, baseline follows its exponential envelope")
def test_tkrr_flops_quadratic_in_I(scaling_report):
    report, elapsed = scaling_report
    rows = [r for r in report.rows if r.algorithm == "tkrr"]
    assert [r.I for r in rows] == [2, 4, 8, 16] and all(r.outcome == "completed" for r in rows)
    I = np.array([r.I for r in rows], float)
    b = np.array([r.flops_measured for r in rows], float)
    A = np.column_stack([np.ones_like(I), I, I**2])
    coef = np.linalg.lstsq(A, b, rcond=None)[0]
    assert np.linalg.norm(A @ coef - b) / np.linalg.norm(b) < 0.10
    assert elapsed < 120


@acceptance(2, "T-KRR FLOPs quadratic in I, baseline follows its exponential envelope")
def test_baseline_flops_track_envelope(scaling_report):
    report, _ = scaling_report
    rows = [r for r in report.rows if r.algorithm == "ridge-direct"]
    feasible = [r for r in rows if r.outcome == "completed"]
    assert [r.I for r in feasible] == [2, 4, 8]
    for r in feasible:
        ratio = r.flops_measured / analytic_flops("ridge-direct", r.I, r.D, r.N)
        assert 0.5 <= ratio <= 2.0, (r.I, ratio)
    assert [r.outcome for r in rows if r.I == 16] == ["baseline-infeasible"]
    # exponential vs. polynomial: doubling I multiplies the baseline cost far more
    tkrr = {r.I: r.flops_measured for r in report.rows if r.algorithm == "tkrr"}
    base = {r.I: r.flops_measured for r in feasible}
    assert base[8] / base[4] > 100 * (tkrr[8] / tkrr[4])


# -- 3 --------------------------------------------------------------------------

@acceptance(3, "baseline NA where the dense cap is exceeded, T-KRR completes everywhere")
def test_infeasibility_pattern():
    cfg = BenchConfig(command="bench-tkrr", synthetic=(30, 8, 0.0),
                      I_grid=(2, 3, 4, 10, 20, 40), rank=(20,), sweeps=2, repeats=1,
                      dense_cap=10**7, reg=1e-6)
    report = cmd_bench_tkrr(cfg)
    base = {r.I: r for r in report.rows if r.algorithm == "ridge-direct"}
    tkrr = {r.I: r for r in report.rows if r.algorithm == "tkrr"}
    assert base[2].outcome == "completed"
    for I in (4, 10, 20, 40):
        assert base[I].outcome == "baseline-infeasible"
        assert base[I].runtime_mean is None and base[I].accuracy is None
    for I in (2, 3, 4, 10, 20, 40):
        assert tkrr[I].outcome == "completed"
        assert np.isfinite(tkrr[I].accuracy) and tkrr[I].runtime_mean is not None
    md = report.to_markdown()
    assert md.count("baseline-infeasible") == sum(r.outcome != "completed" for r in base.values())


# -- 4 --------------------------------------------------------------------------

@acceptance(4, "saturated T-KRR reproduces the dense ridge predictor")
def test_saturated_rank_matches_ridge():
    start = time.perf_counter()
    g = np.random.default_rng(0)
    X = g.uniform(0, 1, (300, 3))
    y = np.sin(3 * X[:, 0]) * np.cos(2 * X[:, 1]) + X[:, 2] ** 2 + 0.05 * g.standard_normal(300)
    train, test = slice(0, 200), slice(200, 300)
    fm = FeatureMap.uniform("poly", 4, 3)
    # rank I^(D-1) = 16 spans every 4x4x4 tensor
    model = tkrr_fit(build_feature_network(fm, X[train]), y[train], 16, 1e-6, sweeps=10, tol=0)
    dense = DenseRidgeModel(ridge_direct_solve(build_phi(fm, X[train]), y[train], 1e-6), fm,
                            1e-6)
    gap = np.sqrt(np.mean((predict(model, X[test]) - predict(dense, X[test])) ** 2))
    assert gap < 1e-4
    assert time.perf_counter() - start < 30


# -- 5 --------------------------------------------------------------------------

def planted_fit(seed):
    synth = generate_synthetic(200, 3, 0.0, seed=seed, basis_count=4, rank=2)
    X, y = synth.data.inputs, synth.data.targets
    model = tkrr_fit(build_feature_network(synth.feature_map, X), y, 2, 1e-8, sweeps=10, tol=0)
    rel = np.sqrt(np.mean((predict(model, X) - y) ** 2) / np.mean(y**2))
    obj = np.array([model.diagnostics.initial_objective] + model.diagnostics.objective)
    return rel, obj, model.diagnostics.sweeps


@acceptance(5, "planted rank-2 model recovered within 10 sweeps, objective monotone")
def test_planted_recovery(record_property):
    rel, obj, sweeps = planted_fit(0)
    assert sweeps <= 10
    assert rel < 1e-4
    assert np.all(np.diff(obj) <= 1e-9)
    results = [planted_fit(seed) for seed in range(20)]
    rate = np.mean([r[0] < 1e-4 for r in results])
    record_property("planted_pass_rate_20_seeds", float(rate))
    print(f"planted recovery pass rate over 20 seeds: {rate:.2f}")
    assert all(np.all(np.diff(r[1]) <= 1e-9) for r in results)


# -- 6 --------------------------------------------------------------------------

def random_instances(count, seed):
    g = np.random.default_rng(seed)
    for k in range(count):
        D = int(g.integers(1, 6))
        dims = tuple(int(v) for v in g.integers(1, 5, size=D))
        yield k, dims, g


@acceptance(6, "CP/Tucker/TT reconstructions match naive loops, TT-SVD meets its budget")
def test_cp_reconstruction_instances():
    for k, dims, g in random_instances(120, 1):
        cp = random_cp(dims, int(g.integers(1, 4)), seed=k)
        assert rel_err(cp_reconstruct(cp).data, naive_cp(cp.weights, cp.factors)) <= 1e-12


@acceptance(6, "CP/Tucker/TT reconstructions match naive loops, TT-SVD meets its budget")
def test_tucker_reconstruction_instances():
    for k, dims, g in random_instances(120, 2):
        ranks = tuple(int(v) for v in g.integers(1, 4, size=len(dims)))
        tk = random_tucker(dims, ranks, seed=k)
        assert rel_err(tucker_reconstruct(tk).data, naive_tucker(tk.core, tk.factors)) <= 1e-12


@acceptance(6, "CP/Tucker/TT reconstructions match naive loops, TT-SVD meets its budget")
def test_tt_reconstruction_instances():
    for k, dims, g in random_instances(120, 3):
        ranks = tuple(int(v) for v in g.integers(1, 4, size=len(dims) - 1))
        tt = random_tt(dims, ranks, seed=k)
        assert rel_err(tt_reconstruct(tt).data, naive_tt(tt.cores)) <= 1e-12


@acceptance(6, "CP/Tucker/TT reconstructions match naive loops, TT-SVD meets its budget")
def test_tt_svd_budget_instances():
    for k, dims, g in random_instances(120, 4):
        X = g.standard_normal(dims)
        eps = float(g.choice([0.0, g.uniform(0, 1)]))
        err = np.linalg.norm(tt_reconstruct(tt_svd_fit(X, eps=eps)).data - X)
        assert err <= (eps + 1e-12) * np.linalg.norm(X), (dims, eps)


# -- 7 --------------------------------------------------------------------------

def layer_instance(g):
    D = int(g.integers(1, 5))
    I = tuple(int(v) for v in g.integers(1, 4, size=D))
    J = tuple(int(v) for v in g.integers(1, 4, size=D))
    full = [1] + [int(v) for v in g.integers(1, 4, size=D - 1)] + [1]
    cores = tuple(g.standard_normal((full[d], I[d], J[d], full[d + 1])) for d in range(D))
    return TTLayer(cores), g.standard_normal(J), g.standard_normal(I)


@acceptance(7, "TT layer forward equals dense matvec and gradients pass finite differences")
def test_layer_forward_grid():
    g = np.random.default_rng(7)
    for _ in range(150):
        layer, x, _ = layer_instance(g)
        dense = layer.to_dense() @ x.reshape(-1, order="F")
        out = tt_layer_forward(layer, x).data.reshape(-1, order="F")
        assert rel_err(out, dense) <= 1e-10


@acceptance(7, "TT layer forward equals dense matvec and gradients pass finite differences")
def test_layer_gradients_finite_differences():
    start = time.perf_counter()
    g = np.random.default_rng(8)
    h = 1e-5
    for _ in range(20):
        layer, x, up = layer_instance(g)
        grads = tt_layer_backward(layer, x, up)
        loss = lambda lay, xx: float(np.sum(up * tt_layer_forward(lay, xx).data))
        for d, core in enumerate(layer.cores):
            fd = np.zeros_like(core)
            for idx in np.ndindex(core.shape):
                plus, minus = list(layer.cores), list(layer.cores)
                plus[d], minus[d] = core.copy(), core.copy()
                plus[d][idx] += h
                minus[d][idx] -= h
                fd[idx] = (loss(TTLayer(tuple(plus)), x) - loss(TTLayer(tuple(minus)), x)) / (2 * h)
            assert rel_err(grads.core_grads[d], fd) < 1e-4
        fd = np.zeros_like(x)
        for idx in np.ndindex(x.shape):
            xp, xm = x.copy(), x.copy()
            xp[idx] += h
            xm[idx] -= h
            fd[idx] = (loss(layer, xp) - loss(layer, xm)) / (2 * h)
        assert rel_err(grads.input_grad, fd) < 1e-4
    assert time.perf_counter() - start < 60


# -- 8 --------------------------------------------------------------------------

@acceptance(8, "Kronecker 8x8 weight compresses to TT rank 1, 64 -> 12 parameters")
def test_kronecker_compression():
    g = np.random.default_rng(0)
    A, B, C = (g.standard_normal((2, 2)) for _ in range(3))
    W = np.kron(np.kron(A, B), C)
    layer = compress_dense_layer(W, (2, 2, 2), (2, 2, 2), eps=0.0)
    assert layer.ranks == (1, 1, 1, 1)
    assert np.linalg.norm(layer.to_dense() - W) < 1e-10 * np.linalg.norm(W)
    assert (layer.dense_parameter_count(), layer.parameter_count()) == (64, 12)


# -- 9 --------------------------------------------------------------------------

@acceptance(9, "large real-dataset results are declared out of scope, never asserted")
def test_large_scale_results_not_asserted():
    readme = (ROOT / "README.md").read_text()
    assert "airline" in readme.lower() and "not reproduced" in readme.lower()
    # no test compares against the reported real-data figures
    reported = {0.763, 0.007, 7141, 0.23, 104.56}
    for path in sorted((ROOT / "tests").glob("test_*.py")):
        tree = ast.parse(path.read_text())
        skip = {id(n) for f in ast.walk(tree) if isinstance(f, ast.FunctionDef)
                and f.name == "test_large_scale_results_not_asserted" for n in ast.walk(f)}
        for node in ast.walk(tree):
            if isinstance(node, ast.Assert) and id(node) not in skip:
                consts = {c.value for c in ast.walk(node) if isinstance(c, ast.Constant)
                          and isinstance(c.value, (int, float))}
                assert not consts & reported, (path.name, node.lineno)
