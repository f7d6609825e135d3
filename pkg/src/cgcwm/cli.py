"""Command-line interface: fit, classify, select-k, simulate, benchmark.

Results go to files; diagnostics go to stderr.  Every subcommand is a pure
function of its input files, flags, and seed, so repeated invocations
produce byte-identical outputs.  Exit codes: 0 success, 2 usage error,
3 data error, 4 numerical failure after restarts.

The environment variable CWM_THREADS caps worker processes for the
benchmark replications (0 = one worker per CPU; unset = sequential).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .classify import classify_responsibilities
from .ecm import FitConfig, e_step, fit
from .errors import (
    CwmError,
    DataError,
    HeaderMismatch,
    NonFiniteValue,
    ParseError,
)
from .gaussian import fit_gaussian
from .model import (
    count_free_parameters,
    params_from_dict,
    params_to_dict,
    sample_dataset,
    samples_to_arrays,
)
from .selection import select_k
from .simulate import ScenarioSpec, run_monte_carlo, scenario_params

__all__ = ["parse_dataset", "run", "main"]


def _fmt(value: float) -> str:
    # 17 significant digits round-trips every finite double exactly.
    return format(float(value), ".17g")


def parse_dataset(path, d_x: int, d_y: int) -> np.ndarray:
    """Read a comma-delimited, UTF-8 dataset with a header row.

    The first ``d_x`` columns are covariates, the next ``d_y`` responses.
    Row order is preserved.  Raises HeaderMismatch on a wrong column count,
    ParseError on a malformed row, NonFiniteValue on any cell that is not a
    finite number (rows and columns are named in the message).
    """
    expected = d_x + d_y
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch(f"{path}: file is empty, expected a header row") from None
        if len(header) != expected:
            raise HeaderMismatch(
                f"{path}: header has {len(header)} columns, expected {expected} "
                f"(d_x={d_x} covariates then d_y={d_y} responses)"
            )
        for i, cells in enumerate(reader, start=1):
            if len(cells) != expected:
                raise ParseError(f"{path}: row {i} has {len(cells)} cells, expected {expected}")
            parsed = []
            for j, cell in enumerate(cells):
                try:
                    value = float(cell)
                except ValueError:
                    value = math.nan
                if not math.isfinite(value):
                    raise NonFiniteValue(
                        f"{path}: non-finite value {cell!r} at row {i}, column {j + 1} "
                        f"({header[j]!r})"
                    )
                parsed.append(value)
            rows.append(parsed)
    return np.array(rows, dtype=float).reshape(len(rows), expected)


def write_dataset(path, data: np.ndarray, d_x: int, d_y: int) -> None:
    """Write a dataset CSV that :func:`parse_dataset` reads back bit-identically."""
    header = [f"x{i + 1}" for i in range(d_x)] + [f"y{i + 1}" for i in range(d_y)]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in np.asarray(data):
            writer.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# Shared flag plumbing
# ---------------------------------------------------------------------------

def _add_fit_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--alpha-star", type=float, default=0.5)
    sub.add_argument("--eta-star", type=float, default=500.0)
    sub.add_argument("--epsilon", type=float, default=1e-4)
    sub.add_argument("--w0", type=float, default=0.999)
    sub.add_argument("--max-iter", type=int, default=1000)
    sub.add_argument("--restarts", type=int, default=5)
    sub.add_argument("--seed", type=int, default=0)


def _config_from_args(args, k: int, d_x: int, d_y: int) -> FitConfig:
    try:
        return FitConfig(
            k=k,
            d_x=d_x,
            d_y=d_y,
            alpha_star=args.alpha_star,
            eta_star=args.eta_star,
            epsilon=args.epsilon,
            w0=args.w0,
            max_iter=args.max_iter,
            restarts=args.restarts,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _n_workers(replications: int) -> int:
    raw = os.environ.get("CWM_THREADS")
    if raw is None:
        return 1
    value = int(raw)
    if value == 0:
        value = os.cpu_count() or 1
    return max(1, min(value, replications))


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_fit(args) -> int:
    data = parse_dataset(args.data, args.dx, args.dy)
    config = _config_from_args(args, args.k, args.dx, args.dy)
    if args.family == "contaminated":
        result = fit(data, config)
        params_dict = params_to_dict(result.params, contaminated=True)
        m = count_free_parameters(result.params, contaminated=True)
    else:
        result = fit_gaussian(data, config)
        params_dict = params_to_dict(result.params.to_contaminated(), contaminated=False)
        m = count_free_parameters(result.params.to_contaminated(), contaminated=False)
    payload = {
        "family": args.family,
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "loglik": float(result.loglik),
        "free_parameters": m,
        "loglik_trace": [float(v) for v in result.loglik_trace],
        "params": params_dict,
    }
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    print(f"fit: wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_classify(args) -> int:
    with open(args.fit, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    params = params_from_dict(payload["params"])
    data = parse_dataset(args.data, params.d_x, params.d_y)
    labels = classify_responsibilities(e_step(data, params))
    records = [
        {
            "component": label.component,
            "category": label.category.value,
            "u": label.y_typical,
            "v": label.x_typical,
            "z": [float(p) for p in label.comp_posterior],
        }
        for label in labels
    ]
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(records, handle, indent=2)
        handle.write("\n")
    print(f"classify: wrote {args.out}", file=sys.stderr)
    return 0


_TABLE_COLUMNS = ["family", "k", "loglik", "m", "bic", "converged"]


def _cmd_select_k(args) -> int:
    if args.out_csv is None and args.out_json is None:
        raise UsageError("select-k requires --out-csv and/or --out-json")
    if args.k_min < 1 or args.k_max < args.k_min:
        raise UsageError("need 1 <= k-min <= k-max")
    data = parse_dataset(args.data, args.dx, args.dy)
    config = _config_from_args(args, args.k_min, args.dx, args.dy)
    result = select_k(data, range(args.k_min, args.k_max + 1), config, family=args.family)
    rows = []
    for entry in result.table:
        rows.append(
            {
                "family": entry.family,
                "k": entry.k,
                "loglik": entry.loglik,
                "m": entry.m,
                "bic": entry.bic,
                "converged": entry.converged,
                "error": entry.error,
            }
        )
    if args.out_csv is not None:
        with open(args.out_csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(_TABLE_COLUMNS)
            for row in rows:
                writer.writerow(
                    [
                        row["family"],
                        row["k"],
                        "" if row["loglik"] is None else _fmt(row["loglik"]),
                        "" if row["m"] is None else row["m"],
                        "" if row["bic"] is None else _fmt(row["bic"]),
                        "" if row["converged"] is None else str(row["converged"]).lower(),
                    ]
                )
        print(f"select-k: wrote {args.out_csv}", file=sys.stderr)
    if args.out_json is not None:
        with open(args.out_json, "w", encoding="utf-8") as handle:
            json.dump({"best_k": result.best_k, "table": rows}, handle, indent=2)
            handle.write("\n")
        print(f"select-k: wrote {args.out_json}", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    params = scenario_params(args.scenario)
    rng = np.random.default_rng(args.seed)
    samples = sample_dataset(params, args.n, rng)
    data, comp, x_typ, y_typ = samples_to_arrays(samples)
    write_dataset(args.out, data, params.d_x, params.d_y)
    truth_path = Path(args.out).with_suffix(".truth.csv")
    with open(truth_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["component", "x_typical", "y_typical"])
        for i in range(len(samples)):
            writer.writerow([int(comp[i]), int(x_typ[i]), int(y_typ[i])])
    print(f"simulate: wrote {args.out} and {truth_path}", file=sys.stderr)
    return 0


def _cmd_benchmark(args) -> int:
    spec = ScenarioSpec(
        scenario=args.scenario, n=args.n, replications=args.reps, seed=args.seed
    )
    updates = {
        "restarts": args.restarts,
        "max_iter": args.max_iter,
        "epsilon": args.epsilon,
    }
    report = run_monte_carlo(
        spec, config_updates=updates, n_workers=_n_workers(args.reps)
    )
    rows = []
    for family in sorted(report.bias):
        bias, mse = report.bias[family], report.mse[family]
        k, n_coef, d_y = bias.shape
        for j in range(k):
            for c in range(n_coef):
                for r in range(d_y):
                    rows.append(
                        {
                            "scenario": report.scenario,
                            "n": report.n,
                            "family": family,
                            "component": j + 1,
                            "coefficient": c,
                            "response": r + 1,
                            "bias": float(bias[j, c, r]),
                            "mse": float(mse[j, c, r]),
                        }
                    )
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["scenario", "n", "family", "component", "coefficient", "response", "bias", "mse"]
        )
        for row in rows:
            writer.writerow(
                [
                    row["scenario"], row["n"], row["family"], row["component"],
                    row["coefficient"], row["response"], _fmt(row["bias"]), _fmt(row["mse"]),
                ]
            )
    json_path = args.out_json or str(Path(args.out).with_suffix(".json"))
    payload = {
        "scenario": report.scenario,
        "n": report.n,
        "replications": report.replications,
        "failures": report.failures,
        "rows": rows,
    }
    with open(json_path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    print(f"benchmark: wrote {args.out} and {json_path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------

class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgcwm",
        description="Robust cluster-weighted regression with contaminated Gaussian components",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one model and write the result JSON")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--dx", type=int, required=True)
    p_fit.add_argument("--dy", type=int, required=True)
    p_fit.add_argument("--k", type=int, required=True)
    p_fit.add_argument("--family", choices=["contaminated", "gaussian"], default="contaminated")
    _add_fit_flags(p_fit)
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(handler=_cmd_fit)

    p_cls = sub.add_parser("classify", help="label observations using a fit result")
    p_cls.add_argument("--data", required=True)
    p_cls.add_argument("--fit", required=True)
    p_cls.add_argument("--out", required=True)
    p_cls.set_defaults(handler=_cmd_classify)

    p_sel = sub.add_parser("select-k", help="sweep k and rank by BIC")
    p_sel.add_argument("--data", required=True)
    p_sel.add_argument("--dx", type=int, required=True)
    p_sel.add_argument("--dy", type=int, required=True)
    p_sel.add_argument("--k-min", type=int, required=True)
    p_sel.add_argument("--k-max", type=int, required=True)
    p_sel.add_argument("--family", choices=["contaminated", "gaussian"], default="contaminated")
    _add_fit_flags(p_sel)
    p_sel.add_argument("--out-csv")
    p_sel.add_argument("--out-json")
    p_sel.set_defaults(handler=_cmd_select_k)

    p_sim = sub.add_parser("simulate", help="sample a benchmark scenario dataset")
    p_sim.add_argument("--scenario", choices=["A", "B"], required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(handler=_cmd_simulate)

    p_bench = sub.add_parser("benchmark", help="bias/MSE Monte Carlo report")
    p_bench.add_argument("--scenario", choices=["A", "B"], required=True)
    p_bench.add_argument("--n", type=int, required=True)
    p_bench.add_argument("--reps", type=int, required=True)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--restarts", type=int, default=5)
    p_bench.add_argument("--max-iter", type=int, default=1000)
    p_bench.add_argument("--epsilon", type=float, default=1e-4)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--out-json")
    p_bench.set_defaults(handler=_cmd_benchmark)

    return parser


def run(argv) -> int:
    """Dispatch a CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (CwmError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
