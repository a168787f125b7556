"""Command-line front end.

Every subcommand writes one record to stdout, as CSV (default) or JSON.
Exit status: 0 success, 1 usage or parameter error, 2 internal
consistency failure (routes disagree, inexact division, failed quadrature).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import analysis, exact, oracle, series
from ._accel import BACKENDS, default_backend
from .errors import ConsistencyError, QuadratureError
from .exact import StatKind

SCHEMA_VERSION = "1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


# -- rendering -----------------------------------------------------------------------


def render_exact(v: int | Fraction) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def render_decimal(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, Fraction)):
        return render_exact(v)
    if isinstance(v, float):
        return render_decimal(v)
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, Fraction)):
        return render_exact(v)
    if isinstance(v, float):
        return v if math.isfinite(v) else render_decimal(v)
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


class Record:
    def __init__(self, command: str, parameters: dict[str, Any]):
        self.command = command
        self.parameters = parameters
        self.rows: list[dict[str, Any]] = []
        self.diagnostics: list[str] = []
        self.metadata: dict[str, Any] = {
            "rng_algorithm": None,
            "seed": parameters.get("seed"),
            "tolerances": {},
            "timing": None,
        }

    def to_csv(self) -> str:
        columns: list[str] = []
        for row in self.rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(row.get(c)) for c in columns) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "rows": [_json_value(r) for r in self.rows],
            "metadata": _json_value(self.metadata),
        }
        return json.dumps(doc, indent=2) + "\n"


# -- subcommands ------------------------------------------------------------------------


def _stat(text: str) -> StatKind:
    try:
        return StatKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cmd_count(args, rec: Record) -> None:
    if args.p is not None:
        rec.rows.append(
            {"stat": args.stat.symbol, "n": args.n, "p": args.p, "count": exact.count_stat(args.stat, args.n, args.p)}
        )
        return
    row = exact.count_row(args.stat, args.n)
    rec.rows.append({f"p{p}": c for p, c in enumerate(row.counts)})


def _wide_row(n: int, counts: Sequence[int], width: int) -> dict[str, Any]:
    row: dict[str, Any] = {"n": n}
    for p in range(width):
        row[f"p{p}"] = counts[p] if p < len(counts) else None
    return row


def _cmd_table(args, rec: Record) -> None:
    for n in range(1, args.n_max + 1):
        rec.rows.append(_wide_row(n, exact.count_row(args.stat, n).counts, args.n_max))


def _cmd_dist(args, rec: Record) -> None:
    dist = analysis.exact_distribution(args.stat, args.n)
    counts = exact.count_row(args.stat, args.n).counts
    for p, q in enumerate(dist.probs):
        row: dict[str, Any] = {"p": p, "count": counts[p], "prob": q, "prob_decimal": float(q)}
        if args.normalize:
            row["x_decimal"] = p / (args.n - 1) if args.n > 1 else 0.0
            row["scaled_density_decimal"] = dist.scaled(p) if args.n > 1 else 1.0
        rec.rows.append(row)


def _cmd_moments(args, rec: Record) -> None:
    report = analysis.mean_variance(args.stat, args.n, args.m)
    direct = analysis.factorial_moment_direct(args.stat, args.n, args.m)
    if direct != report.factorial_moment:
        raise ConsistencyError(
            f"factorial moment m={args.m}: closed form {report.factorial_moment} != direct sum {direct}"
        )
    rec.rows.append(
        {
            "stat": args.stat.symbol,
            "n": args.n,
            "m": args.m,
            "factorial_moment": report.factorial_moment,
            "mean": report.mean,
            "variance": report.variance,
            "factorial_moment_decimal": float(report.factorial_moment),
            "mean_decimal": float(report.mean),
            "variance_decimal": float(report.variance),
        }
    )


def _cmd_asym(args, rec: Record) -> None:
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    rec.metadata["tolerances"] = {"closed_form": "double precision"}
    for i in range(args.points):
        x = i / (args.points - 1)
        if args.cdf:
            rec.rows.append({"x": x, "cdf": analysis.asymptotic_cdf(args.stat, x)})
        else:
            rec.rows.append({"x": x, "density": analysis.asymptotic_density(args.stat, x)})


def _cmd_gf(args, rec: Record) -> None:
    for n, row in enumerate(series.gf_table(args.stat, args.order), start=1):
        for p, c in enumerate(row):
            rec.rows.append({"n": n, "p": p, "coefficient": c})


def _cmd_oracle(args, rec: Record) -> bool:
    res = oracle.enumerate_counts(
        args.n, allow_large=args.allow_large, threads=args.threads, backend=args.backend
    )
    agree_all = True
    gf_rows = {stat: series.gf_table(stat, args.n)[-1] for stat in StatKind}
    for stat in StatKind:
        ex = exact.count_row(stat, args.n).counts
        for p in range(args.n):
            ok = res[stat][p] == ex[p] == gf_rows[stat][p]
            agree_all &= ok
            rec.rows.append(
                {"stat": stat.symbol, "n": args.n, "p": p, "oracle": res[stat][p], "exact": ex[p],
                 "series": gf_rows[stat][p], "agree": ok}
            )
    rec.metadata.update(
        {"agreement": agree_all, "visited": res.visited, "violations": res.violations, "backend": res.backend}
    )
    return agree_all


def _cmd_sample(args, rec: Record) -> None:
    mc = oracle.monte_carlo(args.n, args.reps, args.seed, threads=args.threads, backend=args.backend)
    norm = exact.total_configurations(args.n)
    for stat in StatKind:
        ex = exact.count_row(stat, args.n).counts
        freqs = mc.freqs(stat)
        ses = mc.stderr(stat)
        for p in range(args.n):
            q = Fraction(ex[p], norm)
            se = float(ses[p])
            z = (float(freqs[p]) - float(q)) / se if se > 0 else 0.0
            rec.rows.append(
                {"stat": stat.symbol, "p": p, "hits": int(mc.counts[stat.index, p]), "exact": q,
                 "freq_decimal": float(freqs[p]), "stderr_decimal": se,
                 "exact_decimal": float(q), "z_decimal": z}
            )
    rec.metadata.update(
        {
            "rng_algorithm": mc.rng_algorithm,
            "backend": args.backend or default_backend(),
            "means": {s.symbol: [mc.mean(s), mc.mean_stderr(s)] for s in StatKind},
            "chi_square": {s.symbol: list(v) for s, v in mc.chi_square.items()},
        }
    )
    for s, (chi, dof, pval) in mc.chi_square.items():
        rec.diagnostics.append(f"{s.symbol}: chi2={chi:.3f} dof={dof} p={pval:.4f}")


def _cmd_figure2(args, rec: Record) -> None:
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    grid = [i / (args.points - 1) for i in range(args.points)]
    stats = [args.stat] if args.stat else list(StatKind)
    for stat in stats:
        for row in analysis.convergence_table(stat, args.n, grid):
            rec.rows.append(
                {"stat": stat.symbol, "x": row.x, "p": row.p, "exact_scaled": row.exact_scaled,
                 "asymptotic": row.asymptotic, "abs_error": row.abs_error}
            )


def _cmd_recursion(args, rec: Record) -> bool:
    k0 = [row[0] for row in series.gf_table(StatKind.CROSSING, args.n_max)]
    table = exact.k_recursion_table(args.n_max, k0)
    agree_all = True
    for row in table:
        ok = row.counts == exact.count_row(StatKind.CROSSING, row.n).counts
        agree_all &= ok
        out = _wide_row(row.n, row.counts, args.n_max)
        out["agree"] = ok
        rec.rows.append(out)
    rec.metadata["agreement"] = agree_all
    return agree_all


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(prog="chordstats", description="Marked-chord statistics of linear chord diagrams.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("count", "exact count (or full row)")
    p.add_argument("--stat", type=_stat, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int)

    p = add("table", "rows n = 1..N of a count table")
    p.add_argument("--stat", type=_stat, required=True)
    p.add_argument("--n-max", type=int, required=True)

    p = add("dist", "exact probability distribution")
    p.add_argument("--stat", type=_stat, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--normalize", action="store_true", help="add x = p/(n-1) and (n-1)*prob")

    p = add("moments", "factorial moment, mean and variance")
    p.add_argument("--stat", type=_stat, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("asym", "limiting density or CDF on a uniform grid")
    p.add_argument("--stat", type=_stat, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--cdf", action="store_true")

    p = add("gf", "generating-function coefficients n! [y^p z^n]")
    p.add_argument("--stat", type=_stat, required=True)
    p.add_argument("--order", type=int, required=True)

    p = add("oracle", "brute-force enumeration with agreement report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--allow-large", action="store_true", help=f"permit n = {oracle.OVERRIDE_CAP}")
    p.add_argument("--backend", choices=BACKENDS)

    p = add("sample", "Monte Carlo estimate of the four distributions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--backend", choices=BACKENDS)

    p = add("figure2", "exact scaled distribution against the limiting density")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stat", type=_stat)
    p.add_argument("--points", type=int, default=21)

    p = add("recursion", "crossing table from the n-recursion")
    p.add_argument("--n-max", type=int, required=True)
    return parser


_COMMANDS = {
    "count": _cmd_count,
    "table": _cmd_table,
    "dist": _cmd_dist,
    "moments": _cmd_moments,
    "asym": _cmd_asym,
    "gf": _cmd_gf,
    "oracle": _cmd_oracle,
    "sample": _cmd_sample,
    "figure2": _cmd_figure2,
    "recursion": _cmd_recursion,
}


def _parameters(args) -> dict[str, Any]:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "format"):
            continue
        out[key] = value.symbol if isinstance(value, StatKind) else value
    return out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    rec = Record(args.command, _parameters(args))
    start = time.perf_counter()
    try:
        outcome = _COMMANDS[args.command](args, rec)
    except (ConsistencyError, QuadratureError) as exc:
        print(f"internal consistency failure: {exc}", file=stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"{args.command}: {exc}", file=stderr)
        return 1
    rec.metadata["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    stdout.write(rec.to_json() if args.format == "json" else rec.to_csv())
    for line in rec.diagnostics:
        print(line, file=stderr)
    if outcome is False:
        print(f"{args.command}: routes disagree; see rows with agree=false", file=stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
