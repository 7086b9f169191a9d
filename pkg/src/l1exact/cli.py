"""Command-line front end: exact probabilities, simulation, asymptotics, verify.

Exit codes are part of the contract: 0 ok, 1 verify breach, 2 bad input,
3 quadrature failure, 4 root-finding failure.  Output files (csv or json)
never contain wall-clock time, so re-running a command with the same seed
reproduces them byte for byte regardless of thread count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import shlex
import sys
import time
from dataclasses import dataclass, field

from . import __version__, asymptotics, exactprob, montecarlo, verify
from .asymptotics import AsymParams, BracketFailure, NoSignChange
from .exactprob import ProblemDims, Variant
from .quadrature import QuadratureError

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_BAD_INPUT = 2
EXIT_QUADRATURE = 3
EXIT_ROOTFIND = 4

_THREADS_ENV = "L1EXACT_THREADS"


@dataclass
class OutputRecord:
    command: str
    parameters: dict
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    version: str = ""
    seed: int | None = None
    wall_time_s: float = 0.0

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt_cell(v) for v in row])
        return buf.getvalue()

    def to_json_text(self) -> str:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "version": self.version,
            "seed": self.seed,
            "columns": self.columns,
            "rows": self.rows,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_table_text(self, with_wall_time: bool = True) -> str:
        cells = [[_fmt_cell(v) for v in row] for row in self.rows]
        widths = [
            max(len(self.columns[j]), *(len(r[j]) for r in cells)) if cells else len(self.columns[j])
            for j in range(len(self.columns))
        ]
        lines = [
            "  ".join(name.ljust(w) for name, w in zip(self.columns, widths)).rstrip()
        ]
        for r in cells:
            lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
        if with_wall_time:
            lines.append(f"# wall_time_s={self.wall_time_s:.3f}")
        return "\n".join(lines) + "\n"


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _parse_int_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(text)]


def _parse_float_range(text: str) -> list[float]:
    if ".." in text:
        body, _, step_s = text.partition(":")
        lo_s, hi_s = body.split("..", 1)
        lo, hi, step = float(lo_s), float(hi_s), float(step_s or 0.05)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        out = []
        x = lo
        while x <= hi + 1e-12:
            out.append(round(x, 12))
            x += step
        return out
    return [float(text)]


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(_THREADS_ENV, "1")))
    except ValueError:
        return 1


def _emit(record: OutputRecord, fmt: str, out_path: str | None) -> None:
    if fmt == "csv":
        text = record.to_csv_text()
    elif fmt == "json":
        text = record.to_json_text()
    else:
        text = record.to_table_text(with_wall_time=out_path is None)
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {out_path} ({len(record.rows)} rows, wall {record.wall_time_s:.3f}s)")
    else:
        sys.stdout.write(text)


def _plot_script(csv_path: str, xcol: int, ycol: int, title: str) -> str:
    return (
        "set datafile separator ','\n"
        f"set title '{title}'\n"
        "set key autotitle columnhead\n"
        f"plot '{csv_path}' using {xcol}:{ycol} with linespoints\n"
    )


def cmd_exact(args) -> int:
    variant = Variant(args.variant)
    ms = _parse_int_range(args.m)
    start = time.perf_counter()
    rows = []
    breakdown_lines = []
    for m in ms:
        dims = ProblemDims(args.k, m, args.n)
        bd = exactprob.p_err(variant, dims)
        rows.append([variant.value, args.k, m, args.n, bd.value, bd.error_bound])
        if args.breakdown:
            for t in bd.terms:
                breakdown_lines.append(
                    f"#   m={m} l={t.l} family={t.family.value} count={t.count:.6g} "
                    f"internal={t.internal.value:.6e} external={t.external.value:.6e} "
                    f"term={t.term_value:.6e}"
                )
    record = OutputRecord(
        command=shlex.join(sys.argv[1:]),
        parameters={"variant": variant.value, "k": args.k, "n": args.n, "m": args.m},
        columns=["variant", "k", "m", "n", "p_err", "err_bound"],
        rows=rows,
        version=__version__,
        wall_time_s=time.perf_counter() - start,
    )
    _emit(record, args.format, args.out)
    if args.breakdown and args.format == "table" and not args.out:
        sys.stdout.write("\n".join(breakdown_lines) + ("\n" if breakdown_lines else ""))
    if args.emit_plot_script:
        if not (args.out and args.format == "csv"):
            raise ValueError("--emit-plot-script requires --out with --format csv")
        with open(args.emit_plot_script, "w") as fh:
            fh.write(_plot_script(args.out, 3, 5, f"p_err, {variant.value}, k={args.k}, n={args.n}"))
    return EXIT_OK


def cmd_simulate(args) -> int:
    variant = Variant(args.variant)
    dims = ProblemDims(args.k, args.m, args.n)
    cfg = montecarlo.TrialConfig(
        dims=dims, variant=variant, trials=args.trials, seed=args.seed
    )
    start = time.perf_counter()
    est = montecarlo.estimate(cfg, threads=args.threads)
    record = OutputRecord(
        command=shlex.join(sys.argv[1:]),
        parameters={
            "variant": variant.value, "k": args.k, "m": args.m, "n": args.n,
            "trials": args.trials, "seed": args.seed,
        },
        columns=[
            "variant", "k", "m", "n", "p_err", "trials", "failures",
            "ci_low", "ci_high", "seed",
        ],
        rows=[[
            variant.value, args.k, args.m, args.n, est.p_hat, est.trials,
            est.failures, est.ci_low, est.ci_high, args.seed,
        ]],
        version=__version__,
        seed=args.seed,
        wall_time_s=time.perf_counter() - start,
    )
    if est.flagged:
        print(f"warning: {est.solver_failures} solver failures", file=sys.stderr)
    _emit(record, args.format, args.out)
    return EXIT_OK


def cmd_asym(args) -> int:
    variant = Variant(args.variant)
    if variant not in (Variant.POSITIVE_L1, Variant.STANDARD_L1):
        raise ValueError("asym supports variants pos and std")
    betas = _parse_float_range(args.beta)
    auto = args.alpha == "auto"
    start = time.perf_counter()
    rows = []
    if auto:
        columns = ["variant", "beta", "alpha", "rate", "mu_star", "gamma_star", "beta_over_alpha"]
        for beta in betas:
            a_w = asymptotics.pt_alpha(beta, variant)
            res = asymptotics.rate(variant, AsymParams(alpha=a_w, beta=beta))
            rows.append([variant.value, beta, a_w, res.rate, res.mu_star, res.gamma_star, beta / a_w])
    else:
        alpha = float(args.alpha)
        columns = ["variant", "beta", "alpha", "rate", "mu_star", "gamma_star"]
        for beta in betas:
            res = asymptotics.rate(variant, AsymParams(alpha=alpha, beta=beta))
            rows.append([variant.value, beta, alpha, res.rate, res.mu_star, res.gamma_star])
    record = OutputRecord(
        command=shlex.join(sys.argv[1:]),
        parameters={"variant": variant.value, "beta": args.beta, "alpha": args.alpha},
        columns=columns,
        rows=rows,
        version=__version__,
        wall_time_s=time.perf_counter() - start,
    )
    _emit(record, args.format, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    failures = 0
    for result in verify.run_checks(args.level, threads=args.threads):
        tag = "PASS" if result.passed else "FAIL"
        print(f"{tag} {result.name} margin={result.margin:.3e} {result.detail}")
        failures += not result.passed
    if failures:
        print(f"{failures} check(s) breached")
        return EXIT_BREACH
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l1exact",
        description="Exact and simulated failure probabilities for l1-based sparse recovery",
    )
    parser.add_argument("--version", action="version", version=f"l1exact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common_fmt = {"choices": ("table", "csv", "json"), "default": "table"}

    p = sub.add_parser("exact", help="exact failure probabilities over a range of m")
    p.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", required=True, help="single value or range, e.g. 17..22")
    p.add_argument("--breakdown", action="store_true", help="print per-face-dimension terms")
    p.add_argument("--format", **common_fmt)
    p.add_argument("--out", default=None)
    p.add_argument("--emit-plot-script", default=None, metavar="PATH")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo recovery experiments")
    p.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--format", **common_fmt)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("asym", help="rate functions and phase-transition curve")
    p.add_argument("--variant", required=True, choices=("pos", "std"))
    p.add_argument("--beta", required=True, help="single value or range lo..hi:step")
    p.add_argument("--alpha", required=True, help="a number, or 'auto' for the transition")
    p.add_argument("--format", **common_fmt)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("verify", help="run the invariant check suites")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, montecarlo.SolverFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except (NoSignChange, BracketFailure) as exc:
        print(f"root-finding failure: {exc}", file=sys.stderr)
        return EXIT_ROOTFIND


if __name__ == "__main__":
    sys.exit(main())
