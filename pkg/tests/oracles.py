"""Naive nested-loop evaluations used as independent oracles."""

import itertools

import numpy as np


def naive_cp(weights, factors):
    dims = [f.shape[0] for f in factors]
    out = np.zeros(dims)
    for idx in itertools.product(*map(range, dims)):
        s = 0.0
        for r in range(len(weights)):
            p = weights[r]
            for d, i in enumerate(idx):
                p *= factors[d][i, r]
            s += p
        out[idx] = s
    return out


def naive_tucker(core, factors):
    dims = [f.shape[0] for f in factors]
    out = np.zeros(dims)
    for idx in itertools.product(*map(range, dims)):
        s = 0.0
        for ridx in itertools.product(*map(range, core.shape)):
            p = core[ridx]
            for d, (i, r) in enumerate(zip(idx, ridx)):
                p *= factors[d][i, r]
            s += p
        out[idx] = s
    return out


def naive_tt(cores):
    dims = [c.shape[1] for c in cores]
    out = np.zeros(dims)
    inner = [c.shape[2] for c in cores[:-1]]
    for idx in itertools.product(*map(range, dims)):
        s = 0.0
        for ridx in itertools.product(*map(range, inner)):
            r = (0,) + ridx + (0,)
            p = 1.0
            for d, i in enumerate(idx):
                p *= cores[d][r[d], i, r[d + 1]]
            s += p
        out[idx] = s
    return out


def rel_err(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300)
