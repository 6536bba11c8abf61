"""Command-line interface: ``bicbf {bf,batch,anova,simulate}``.

Exit codes: 0 success, 1 computation or validation error, 2 usage error,
3 batch run where some rows failed and at least one succeeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import kernels
from .anova import NConvention, effect_summary, read_dataset_csv, sse_pair_for_effect, two_way_anova
from .core import AnovaSummary, bf01_from_sse, bf01_from_summary
from .errors import BicBfError, ParseError, RowError
from .parser import WarningCode, summary_warnings, parse_summary, read_batch_csv
from .sim import REPORT_FORMATS, SimulationConfig, render_report, run_simulation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3


class UsageError(Exception):
    pass


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}g}"


def _open_out(path: str):
    if path == "-":
        return sys.stdout
    return open(path, "w", newline="")


def _result_obj(result, warnings) -> dict:
    return {
        "bf01": result.bf01,
        "bf10": result.bf10,
        "log_bf10": result.log_bf10,
        "category": result.category,
        "warnings": [str(w) for w in warnings],
    }


# ---------------------------------------------------------------- bf

def cmd_bf(args) -> int:
    if args.summary is not None:
        if args.f is not None or args.df1 is not None or args.df2 is not None:
            raise UsageError("use either --summary or --f/--df1/--df2, not both")
        summary = parse_summary(args.summary)
        if args.n is not None:
            if summary.n is not None and summary.n != args.n:
                raise UsageError(f"--n {args.n} contradicts n={summary.n} in the summary")
            summary = summary.with_n(args.n)
    else:
        missing = [o for o in ("f", "df1", "df2") if getattr(args, o) is None]
        if missing:
            raise UsageError("missing --" + ", --".join(missing) + " (or give --summary)")
        summary = AnovaSummary(args.f, args.df1, args.df2, args.n)
    if summary.n is None:
        raise UsageError(f"sample size unknown ({WarningCode.N_MISSING}): pass --n")

    result = bf01_from_summary(summary)
    warnings = summary_warnings(summary)
    if args.json:
        print(json.dumps(_result_obj(result, warnings)))
        return EXIT_OK
    p = args.precision
    lines = [f"BF01 = {_fmt(result.bf01, p)}", f"BF10 = {_fmt(result.bf10, p)}"]
    if args.direction == "10":
        lines.reverse()
    lines.append(f"log BF10 = {_fmt(result.log_bf10, p)}")
    lines.append(f"evidence: {result.category}")
    if warnings:
        lines.append("warnings: " + ", ".join(str(w) for w in warnings))
    print("\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------- batch

_BATCH_COLUMNS = ("row", "label", "f", "df1", "df2", "n", "bf01", "bf10", "log_bf10", "category", "warnings")


def cmd_batch(args) -> int:
    try:
        data = Path(args.input).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR
    records, errors = read_batch_csv(io.BytesIO(data))

    rows = []
    for rec in records:
        s = rec.summary
        if s.n is None:
            errors.append(RowError(rec.source_line, "n", f"{WarningCode.N_MISSING}: sample size required"))
            continue
        res = bf01_from_summary(s)
        rows.append({
            "row": rec.source_line, "label": s.label or "", "f": s.f_value,
            "df1": s.df1, "df2": s.df2, "n": s.n,
            **_result_obj(res, rec.warnings),
        })
    errors.sort(key=lambda e: e.row)

    out = _open_out(args.output)
    try:
        if args.format == "json":
            out.write(json.dumps(rows, indent=2) + "\n")
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(_BATCH_COLUMNS)
            for r in rows:
                w.writerow([";".join(r[c]) if c == "warnings" else r[c] for c in _BATCH_COLUMNS])
    finally:
        if out is not sys.stdout:
            out.close()

    if errors:
        if args.errors:
            err_out = open(args.errors, "w", newline="")
        elif args.output != "-":
            err_out = open(args.output + ".errors.csv", "w", newline="")
        else:
            err_out = sys.stderr
        try:
            w = csv.writer(err_out, lineterminator="\n")
            w.writerow(("row", "column", "message"))
            for e in errors:
                w.writerow((e.row, e.column or "", e.message))
        finally:
            if err_out is not sys.stderr:
                err_out.close()
    if errors and rows:
        return EXIT_PARTIAL
    return EXIT_ERROR if errors else EXIT_OK


# ---------------------------------------------------------------- anova

def cmd_anova(args) -> int:
    try:
        data = Path(args.input).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_ERROR
    conv = NConvention(args.n_convention)
    if conv is NConvention.EXPLICIT and args.n is None:
        raise UsageError("--n-convention explicit requires --n")
    dataset = read_dataset_csv(io.BytesIO(data))
    table = two_way_anova(dataset)
    out = []
    for effect, row in table.effects.items():
        summary = effect_summary(table, effect, conv, args.n)
        res = bf01_from_summary(summary)
        check = bf01_from_sse(sse_pair_for_effect(table, effect), summary.n, row.df)
        out.append({
            "effect": str(effect), "ss": row.ss, "df": row.df, "f": row.f,
            "df_error": table.df_error, "n": summary.n,
            **_result_obj(res, []),
            "log_bf10_sse": check.log_bf10,
        })
    if args.json:
        print(json.dumps({"ss_error": table.ss_error, "df_error": table.df_error,
                          "total_ss": table.total_ss, "effects": out}, indent=2))
        return EXIT_OK
    p = args.precision
    print(f"{'effect':<6} {'SS':>12} {'df':>4} {'F':>12} {'BF01':>12} {'BF10':>12}  evidence")
    for r in out:
        print(f"{r['effect']:<6} {_fmt(r['ss'], p):>12} {r['df']:>4} {_fmt(r['f'], p):>12} "
              f"{_fmt(r['bf01'], p):>12} {_fmt(r['bf10'], p):>12}  {r['category']}")
    print(f"{'error':<6} {_fmt(table.ss_error, p):>12} {table.df_error:>4}")
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}")


def _sim_config(args) -> SimulationConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load config {args.config}: {exc}")
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
    overrides = {
        "cell_sizes": args.cell_sizes,
        "effect_variances": args.g_values,
        "replications": args.reps,
        "master_seed": args.seed,
        "n_convention": args.n_convention,
        "explicit_n": args.n,
        "error_sd": args.error_sd,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.sum_to_zero:
        data["sum_to_zero"] = True
    try:
        return SimulationConfig.from_dict(data)
    except (BicBfError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid simulation config: {exc}")


def cmd_simulate(args) -> int:
    config = _sim_config(args)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    try:
        backend = kernels if args.backend == "auto" else kernels.get_backend(args.backend)
    except ValueError as exc:
        raise UsageError(str(exc))
    results = run_simulation(config, threads=args.threads, backend=backend)
    report = render_report(results, args.format, precision=args.precision)
    if args.output == "-":
        sys.stdout.buffer.write(report)
        sys.stdout.flush()
    else:
        Path(args.output).write_bytes(report)
    return EXIT_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicbf", description="BIC-approximated Bayes factors for ANOVA effects"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bf = sub.add_parser("bf", help="Bayes factor for one reported F test")
    bf.add_argument("--summary", help='e.g. "F(1,17)=1.75, p=0.20"')
    bf.add_argument("--f", type=float)
    bf.add_argument("--df1", type=int)
    bf.add_argument("--df2", type=int)
    bf.add_argument("--n", type=int)
    bf.add_argument("--direction", choices=("01", "10"), default="01")
    bf.add_argument("--json", action="store_true")
    bf.add_argument("--precision", type=int, default=6)
    bf.set_defaults(func=cmd_bf)

    batch = sub.add_parser("batch", help="Bayes factors for a CSV of summaries")
    batch.add_argument("--input", required=True)
    batch.add_argument("--output", default="-")
    batch.add_argument("--errors", help="error report path (default: OUTPUT.errors.csv or stderr)")
    batch.add_argument("--format", choices=("csv", "json"), default="csv")
    batch.set_defaults(func=cmd_batch)

    an = sub.add_parser("anova", help="ANOVA and Bayes factors from raw a_level,b_level,value CSV")
    an.add_argument("--input", required=True)
    an.add_argument("--n-convention", choices=[c.value for c in NConvention], default="total")
    an.add_argument("--n", type=int)
    an.add_argument("--json", action="store_true")
    an.add_argument("--precision", type=int, default=6)
    an.set_defaults(func=cmd_anova)

    sim = sub.add_parser("simulate", help="Monte Carlo study on simulated factorial data")
    sim.add_argument("--config", help="JSON file with SimulationConfig fields")
    sim.add_argument("--cell-sizes", type=_int_list)
    sim.add_argument("--g-values", type=_float_list)
    sim.add_argument("--reps", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--n-convention", choices=[c.value for c in NConvention])
    sim.add_argument("--n", type=int, help="n for the explicit convention")
    sim.add_argument("--error-sd", type=float)
    sim.add_argument("--sum-to-zero", action="store_true")
    sim.add_argument("--format", choices=REPORT_FORMATS, default="markdown")
    sim.add_argument("--output", default="-")
    sim.add_argument("--threads", type=int, default=1)
    sim.add_argument("--backend", choices=("auto", "cython", "python"), default="auto")
    sim.add_argument("--precision", type=int, default=6)
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "precision", 6) < 1:
        print("error: --precision must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except BicBfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
