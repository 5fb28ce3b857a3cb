"""Efficiency metrics: analytic FLOP envelopes, timing and reports.

Measured FLOPs come from :mod:`tnkit.flops` scopes; :func:`analytic_flops`
gives the leading-term operation estimates the measurements are checked
against. A report row (:class:`EfficiencyReport`) relates parameter
counts, FLOPs, wall-clock time and accuracy for one configuration, and
:func:`build_report` renders rows as JSON, Markdown and CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from dataclasses import dataclass, field, fields, replace

from .flops import FlopCounter, count_scope, flop_scope

__all__ = [
    "ALGORITHMS",
    "ANALYTIC_CONSTANTS",
    "OUTCOMES",
    "SCHEMA_VERSION",
    "analytic_flops",
    "count_scope",
    "flop_scope",
    "Timing",
    "time_run",
    "table_parameters",
    "EfficiencyReport",
    "Report",
    "build_report",
    "parameter_rows",
]

SCHEMA_VERSION = "tnkit-efficiency-report/1"
OUTCOMES = ("completed", "baseline-infeasible", "not-run")

# Constants C with measured <= C * analytic (multiplies plus additions) for
# the kernels in this package, over D <= 5, I <= 4, R <= 5. The larger
# values are reached only at degenerate sizes (I = 1, IR = 1, or D = 1 with
# R = 1) where lower-order terms dominate; away from them the ratios are
# about 1 (ridge, ALS sweep) and 2 (TT forward, dense matvec).
ANALYTIC_CONSTANTS = {
    "ridge-direct": 8,
    "tkrr-als-sweep": 16,
    "tt-forward": 2,
    "tt-backward": 8,
    "dense-matvec": 2,
}
ALGORITHMS = tuple(ANALYTIC_CONSTANTS)


def analytic_flops(algorithm: str, I: int, D: int, N: int = 0, R: int = 1,
                   J: int | None = None) -> int:
    """Leading-term operation count of one run of ``algorithm``.

    ==================  ===================================
    ``ridge-direct``    ``N I^(2D) + I^(3D)``
    ``tkrr-als-sweep``  ``D N (IR)^2 + D (IR)^3``
    ``tt-forward``      ``D R^2 I max(I^D, J^D)``
    ``tt-backward``     ``D^2 R^4 I max(I^D, J^D)``
    ``dense-matvec``    ``I^D J^D``
    ==================  ===================================

    ``J`` defaults to ``I``. Values are exact Python integers. The
    constants relating them to measured counts are in
    :data:`ANALYTIC_CONSTANTS`.

    Raises
    ------
    ValueError
        For an unknown algorithm id or negative sizes.
    """
    if algorithm not in ANALYTIC_CONSTANTS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    I, D, N, R = int(I), int(D), int(N), int(R)
    J = I if J is None else int(J)
    if min(I, D, R, J) < 1 or N < 0:
        raise ValueError("I, D, R, J must be >= 1 and N >= 0")
    if algorithm == "ridge-direct":
        return N * I ** (2 * D) + I ** (3 * D)
    if algorithm == "tkrr-als-sweep":
        return D * N * (I * R) ** 2 + D * (I * R) ** 3
    if algorithm == "tt-forward":
        return D * R**2 * I * max(I**D, J**D)
    if algorithm == "tt-backward":
        return D**2 * R**4 * I * max(I**D, J**D)
    return I**D * J**D


@dataclass(frozen=True)
class Timing:
    """Wall-clock seconds over ``runs`` timed repeats; ``std`` is None for one run."""

    mean: float
    std: float | None
    runs: int
    samples: tuple = ()


def time_run(computation, repeats: int = 3, warmup: int = 0) -> Timing:
    """Time ``computation()`` with a monotonic clock.

    Warmup calls are made first and excluded. The standard deviation is
    the sample standard deviation and is only reported for ``repeats >= 2``.
    """
    repeats = int(repeats)
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    for _ in range(int(warmup)):
        computation()
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        computation()
        samples.append(time.perf_counter() - start)
    std = statistics.stdev(samples) if repeats >= 2 else None
    return Timing(statistics.fmean(samples), std, repeats, tuple(samples))


def table_parameters(I: int, D: int, R: int) -> tuple[int, int]:
    """Exact ``(I^D, R*I*D)``: dense weight entries and CP factor entries."""
    I, D, R = int(I), int(D), int(R)
    return I**D, R * I * D


@dataclass(frozen=True)
class EfficiencyReport:
    """One configuration of one algorithm.

    ``baseline_parameters`` and ``tn_parameters`` are the two parameter
    columns (dense vs. tensor network); ``parameter_count`` is the count of
    the model this row measures. Rows with outcome ``baseline-infeasible``
    or ``not-run`` carry no timing, FLOP or accuracy values.
    """

    algorithm: str
    I: int
    D: int
    N: int = 0
    R: int = 1
    J: int | None = None
    reg: float | None = None
    seed: int | None = None
    outcome: str = "completed"
    baseline_parameters: int | None = None
    tn_parameters: int | None = None
    parameter_count: int | None = None
    flops_analytic: int | None = None
    multiplies: int | None = None
    additions: int | None = None
    repeats: int = 1
    runtime_mean: float | None = None
    runtime_std: float | None = None
    accuracy_metric: str | None = None
    accuracy: float | None = None
    hardware: str = ""
    energy_kwh: float | None = None
    co2e_g: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}, got {self.outcome!r}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.outcome != "completed":
            measured = (self.runtime_mean, self.runtime_std, self.accuracy,
                        self.multiplies, self.additions)
            if any(v is not None for v in measured):
                raise ValueError(f"{self.outcome} rows carry no measured values")
        if self.runtime_std is not None and self.repeats < 2:
            raise ValueError("a standard deviation needs repeats >= 2")

    @property
    def flops_measured(self) -> int | None:
        if self.multiplies is None or self.additions is None:
            return None
        return self.multiplies + self.additions

    def with_flops(self, counter: FlopCounter) -> "EfficiencyReport":
        return replace(self, multiplies=counter.multiplies, additions=counter.additions)

    def with_timing(self, timing: Timing) -> "EfficiencyReport":
        return replace(self, repeats=timing.runs, runtime_mean=timing.mean,
                        runtime_std=timing.std)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = _clean(getattr(self, f.name))
            if f.name == "additions":
                out["flops_measured"] = self.flops_measured
        return out


def _clean(value):
    # JSON-safe, deterministic: non-finite floats become null, dict keys sorted
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _clean(value[k]) for k in sorted(value)}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


_TABLE_COLUMNS = ("algorithm", "I", "D", "N", "R", "runtime [s]", "params (baseline)",
                  "params (TN)", "FLOPs", "accuracy", "outcome")


def _fmt_float(x: float) -> str:
    return f"{x:.4g}"


def _table_cells(row: EfficiencyReport) -> list[str]:
    na = row.outcome == "baseline-infeasible"

    def opt(value, fmt=str):
        if value is None:
            return "NA" if na else "-"
        return fmt(value)

    if row.runtime_mean is None:
        runtime = "NA" if na else "-"
    elif row.runtime_std is None:
        runtime = _fmt_float(row.runtime_mean)
    else:
        runtime = f"{_fmt_float(row.runtime_mean)} ± {_fmt_float(row.runtime_std)}"
    accuracy = opt(row.accuracy, _fmt_float)
    if row.accuracy is not None and row.accuracy_metric:
        accuracy = f"{row.accuracy_metric} {accuracy}"
    return [row.algorithm, str(row.I), str(row.D), str(row.N), str(row.R), runtime,
            opt(row.baseline_parameters), opt(row.tn_parameters),
            opt(row.flops_measured), accuracy, row.outcome]


@dataclass(frozen=True)
class Report:
    rows: tuple
    hardware: str = ""

    def to_dict(self) -> dict:
        return {"schema": SCHEMA_VERSION, "hardware": self.hardware,
                "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False, ensure_ascii=False) + "\n"

    def to_markdown(self) -> str:
        lines = ["| " + " | ".join(_TABLE_COLUMNS) + " |",
                 "|" + "---|" * len(_TABLE_COLUMNS)]
        for r in self.rows:
            lines.append("| " + " | ".join(_table_cells(r)) + " |")
        if self.hardware:
            lines += ["", f"Hardware: {self.hardware}"]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        dicts = [r.to_dict() for r in self.rows]
        names = [k for k in dicts[0] if k != "extra"]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for d in dicts:
            writer.writerow(["" if d[k] is None else d[k] for k in names])
        return buf.getvalue()


def build_report(rows, hardware: str | None = None) -> Report:
    """Collect rows into a :class:`Report`.

    Raises
    ------
    ValueError
        If ``rows`` is empty.
    """
    rows = tuple(rows)
    if not rows:
        raise ValueError("a report needs at least one row")
    for r in rows:
        if not isinstance(r, EfficiencyReport):
            raise TypeError(f"expected EfficiencyReport rows, got {type(r).__name__}")
    if hardware is None:
        hardware = rows[0].hardware
    return Report(rows, hardware)


def parameter_rows(I_values, D: int, R: int, hardware: str = "") -> list[EfficiencyReport]:
    """Parameter-only T-KRR rows (outcome ``not-run``) for a grid of ``I``."""
    rows = []
    for I in I_values:
        base, tn = table_parameters(I, D, R)
        rows.append(EfficiencyReport(
            algorithm="tkrr", I=int(I), D=int(D), R=int(R), outcome="not-run",
            baseline_parameters=base, tn_parameters=tn, parameter_count=tn,
            hardware=hardware))
    return rows
