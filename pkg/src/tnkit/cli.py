"""Command-line interface: ``tnkit <command> [options]``.

Commands: bench-tkrr, bench-ttlayer, compress, gen-synthetic, fit, predict.
Options may also come from a flat ``key = value`` file given with
``--config``; keys are option names without the leading dashes, and
command-line flags win over file values.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (DEFAULT_DENSE_CAP, BenchConfig, cmd_bench_ttlayer, cmd_bench_tkrr,
                    cmd_compress, cmd_fit, cmd_gen_synthetic, rmse)
from .data import load_csv, write_csv
from .errors import ConfigError, DimensionError, FormatError, SolverError, TrainingError
from .storage import load_network, save_network
from .tkrr import predict

__all__ = ["main", "build_parser", "read_config_file"]

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("tnkit")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> tuple:
    try:
        values = tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _synthetic(text: str) -> tuple:
    parts = str(text).replace(" ", "").split(",")
    try:
        N, D, noise = int(parts[0]), int(parts[1]), float(parts[2])
    except (IndexError, ValueError):
        raise argparse.ArgumentTypeError(f"expected N,D,noise, got {text!r}")
    if len(parts) != 3 or N < 1 or D < 1 or not noise >= 0:
        raise argparse.ArgumentTypeError(f"expected N,D >= 1 and noise >= 0, got {text!r}")
    return N, D, noise


def _domain(text: str) -> tuple:
    try:
        lo, hi = (float(v) for v in str(text).replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"need LO < HI, got {text!r}")
    return lo, hi


def _add_common(p, *, data=True):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path")
    p.add_argument("--hardware", default="", help="free-text hardware descriptor")
    p.add_argument("-v", "--verbose", action="store_true")
    if data:
        p.add_argument("--data", help="CSV file with a header row")
        p.add_argument("--target-col", help="target column name or index (default: last)")
        p.add_argument("--synthetic", type=_synthetic, metavar="N,D,NOISE",
                       help="planted-model synthetic dataset")
        p.add_argument("--planted-rank", type=int, default=2)
        p.add_argument("--basis", choices=("fourier", "poly"), default="fourier")
        p.add_argument("--domain", type=_domain, metavar="LO,HI",
                       help="input domain for the feature map (default: from the data)")


def _add_fit_options(p, I_default, rank_default):
    p.add_argument("--I-grid", dest="I_grid", type=_int_list, default=I_default,
                   help="basis functions per dimension, comma-separated")
    p.add_argument("--rank", type=_int_list, default=rank_default,
                   help="CP rank(s), comma-separated")
    p.add_argument("--reg", type=float, default=1e-6)
    p.add_argument("--sweeps", type=int, default=10)
    p.add_argument("--tol", type=float, default=0.0,
                   help="relative early-stop tolerance per sweep (0 runs all sweeps)")


def _add_report_options(p):
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--markdown", help="also write a Markdown table here")
    p.add_argument("--csv", help="also write CSV rows here")
    p.add_argument("--dense-cap", dest="dense_cap", type=int, default=DEFAULT_DENSE_CAP,
                   help="max elements of a dense baseline matrix")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tnkit", description="Tensor-network regression and layer benchmarks")
    parser.add_argument("--version", action="version", version=f"tnkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bench-tkrr", help="dense ridge baseline vs. T-KRR")
    _add_common(p)
    _add_fit_options(p, (2, 3), (20,))
    _add_report_options(p)

    p = sub.add_parser("bench-ttlayer", help="dense vs. TT layer passes")
    _add_common(p, data=False)
    p.add_argument("--D-grid", dest="D_grid", type=_int_list, default=(3,))
    p.add_argument("--I-grid", dest="I_grid", type=_int_list, default=(4,),
                   help="output mode sizes")
    p.add_argument("--J", type=int, help="input mode size (default: I)")
    p.add_argument("--rank", type=_int_list, default=(2,))
    p.add_argument("--batch", type=int, default=1)
    _add_report_options(p)

    p = sub.add_parser("compress", help="compress a dense matrix into a TT layer")
    _add_common(p, data=False)
    p.add_argument("input", help="matrix in the tensor binary format")
    p.add_argument("--row-factors", dest="row_factors", type=_int_list)
    p.add_argument("--col-factors", dest="col_factors", type=_int_list)
    p.add_argument("--eps", type=float, help="relative error budget")
    p.add_argument("--max-rank", dest="max_rank", type=int)
    p.add_argument("--report", help="report JSON path (default: <out>.report.json)")

    p = sub.add_parser("gen-synthetic", help="write a planted-model CSV dataset")
    _add_common(p)
    p.add_argument("--I-grid", dest="I_grid", type=_int_list, default=(4,),
                   help="basis functions per dimension of the planted model")

    p = sub.add_parser("fit", help="fit T-KRR and save the model")
    _add_common(p)
    _add_fit_options(p, (4,), (2,))
    p.add_argument("--diagnostics", help="write fit diagnostics JSON here")

    p = sub.add_parser("predict", help="predict with a saved model")
    _add_common(p, data=False)
    p.add_argument("--model", help="saved model container")
    p.add_argument("--data", help="CSV of inputs (optionally with target)")
    p.add_argument("--target-col", help="target column, if the CSV has one")
    return parser


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config_file(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    argv_cfg = []
    for key, value in values.items():
        if key not in known or key in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes"):
                argv_cfg.append(action.option_strings[0])
            continue
        if action.option_strings:
            argv_cfg += [action.option_strings[0], value]
    # file values first, command-line flags after so they win
    rest = list(argv)
    rest.remove(args.command)
    return parser.parse_args([args.command] + argv_cfg + rest)


def _config_from(args) -> BenchConfig:
    cfg = BenchConfig(command=args.command)
    for name in vars(cfg):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    return cfg


def _write(path, text):
    Path(path).write_text(text)


def _emit_report(report, args):
    if args.out:
        _write(args.out, report.to_json())
    else:
        sys.stdout.write(report.to_json())
    if getattr(args, "markdown", None):
        _write(args.markdown, report.to_markdown())
    if getattr(args, "csv", None):
        _write(args.csv, report.to_csv())
    sys.stderr.write(report.to_markdown())


def _run(args) -> int:
    cfg = _config_from(args)
    log.info("running %s", args.command)
    if args.command == "bench-tkrr":
        _emit_report(cmd_bench_tkrr(cfg), args)
    elif args.command == "bench-ttlayer":
        _emit_report(cmd_bench_ttlayer(cfg), args)
    elif args.command == "compress":
        cfg.out = args.out
        _, report = cmd_compress(cfg)
        target = args.report or (f"{args.out}.report.json" if args.out else None)
        if target:
            _write(target, report.to_json())
        else:
            sys.stdout.write(report.to_json())
        sys.stderr.write(report.to_markdown())
    elif args.command == "gen-synthetic":
        data = cmd_gen_synthetic(cfg)
        if args.out:
            write_csv(args.out, data)
        else:
            write_csv(sys.stdout, data)
    elif args.command == "fit":
        model, summary = cmd_fit(cfg)
        if args.out:
            save_network(args.out, model)
        if args.diagnostics:
            _write(args.diagnostics, model.diagnostics.to_json())
        summary.pop("diagnostics")
        sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    elif args.command == "predict":
        if not args.model or not args.data:
            raise ConfigError("predict needs --model and --data")
        model = load_network(args.model)
        if not hasattr(model, "feature_map"):
            raise FormatError(f"{args.model} does not hold a regression model")
        D = model.feature_map.ndim
        data, _ = load_csv(args.data, args.target_col)
        if data.ndim == D - 1 and args.target_col is None:
            raise DimensionError(f"model expects {D} input columns, CSV has {data.ndim + 1}")
        X = data.inputs if data.ndim == D else np.column_stack([data.inputs, data.targets])
        yhat, clipped = predict(model, X, return_clipped=True)
        lines = ["prediction,clipped"] + [f"{v:.17g},{int(c)}" for v, c in zip(yhat, clipped)]
        text = "\n".join(lines) + "\n"
        if args.out:
            _write(args.out, text)
        else:
            sys.stdout.write(text)
        if data.ndim == D:
            sys.stderr.write(f"rmse {rmse(yhat, data.targets):.6g}\n")
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except ConfigError as exc:
        sys.stderr.write(f"tnkit: configuration error: {exc}\n")
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _run(args)
    except (OSError, FormatError) as exc:
        sys.stderr.write(f"tnkit: I/O error: {exc}\n")
        return EXIT_IO
    except (SolverError, TrainingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"tnkit: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        # ConfigError, DimensionError, RankError, SizeError and bad values
        sys.stderr.write(f"tnkit: configuration error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
