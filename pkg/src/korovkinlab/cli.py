"""Experiment runner, configuration and report emission.

``korovkin run`` executes the (operator x degree x exponent x function x
theorem) cross-product, writes one CSV of raw measurements plus a plain
text report of fitted constants and rate slopes, and exits nonzero when
any axiom, stability or hard bound check fails.  Output is byte-identical
across runs with the same config and seed.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .axioms import run_axiom_suite
from .funcspace import INF, Grid, suite_by_id
from .korovkin import (
    THEOREM_IDS,
    InsufficientDataError,
    OperatorSpec,
    check_compatibility,
    compute_indices,
    rate_estimate,
    theorem_bound,
)
from .operators import OPERATOR_KINDS

CSV_HEADER = [
    "experiment",
    "operator",
    "n",
    "p",
    "function",
    "error_lp",
    "lambda_p",
    "mu_n",
    "t_np",
    "s_np",
    "theorem",
    "rhs_core",
    "ratio",
]

P_MENU = (1.0, 1.5, 2.0, 4.0, INF)

STABILITY_FACTOR = 1.25
STABILITY_EPS = 1e-9
HARD_ZERO = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of one experiment run."""

    operators: tuple[str, ...] = OPERATOR_KINDS
    degrees: tuple[int, ...] = (8, 16, 32, 64, 128, 256, 512)
    exponents: tuple[float, ...] = (1.0, 2.0, INF)
    functions: tuple[str, ...] = tuple(suite_by_id())
    theorems: tuple[str, ...] = THEOREM_IDS
    grid_m: int = 1024
    sup_samples: int = 64
    choquet_samples: int = 1024
    seed: int = 1234
    output_path: str = "korovkin_out"

    def validate(self) -> list[str]:
        problems = []
        known_f = set(suite_by_id())
        if not self.operators or any(k not in OPERATOR_KINDS for k in self.operators):
            problems.append(f"operators: must be a nonempty subset of {OPERATOR_KINDS}")
        if not self.degrees or any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            problems.append("degrees: must be nonempty and strictly increasing")
        elif any(n < 1 for n in self.degrees):
            problems.append("degrees: must be positive integers")
        if not self.exponents or any(p not in P_MENU for p in self.exponents):
            problems.append("exponents: must be a nonempty subset of {1, 1.5, 2, 4, inf}")
        if not self.functions or any(fid not in known_f for fid in self.functions):
            problems.append(f"functions: must be a nonempty subset of {sorted(known_f)}")
        if not self.theorems or any(t not in THEOREM_IDS for t in self.theorems):
            problems.append(f"theorems: must be a nonempty subset of {THEOREM_IDS}")
        if self.grid_m < 256:
            problems.append("grid_m: must be at least 256")
        if self.sup_samples < 2:
            problems.append("sup_samples: must be at least 2")
        if self.choquet_samples < 16:
            problems.append("choquet_samples: must be at least 16")
        if not self.output_path:
            problems.append("output_path: must be nonempty")
        return problems


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def _parse_p(tok: str) -> float:
    if tok == "inf":
        return INF
    return float(tok)


def format_p(p: float) -> str:
    return "inf" if p == INF else f"{p:g}"


def fmt(x: float) -> str:
    """Floats to 12 significant digits, locale independent."""
    return f"{float(x):.12g}"


_LIST_FIELDS = {
    "operators": str,
    "degrees": int,
    "exponents": _parse_p,
    "functions": str,
    "theorems": str,
}
_SCALAR_FIELDS = {
    "grid_m": int,
    "sup_samples": int,
    "choquet_samples": int,
    "seed": int,
    "output_path": str,
}


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read a flat key=value config file; lists are comma separated."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key in _LIST_FIELDS:
                conv = _LIST_FIELDS[key]
                values[key] = tuple(conv(tok.strip()) for tok in val.split(",") if tok.strip())
            elif key in _SCALAR_FIELDS:
                values[key] = _SCALAR_FIELDS[key](val)
            else:
                raise ValueError(f"unknown config field {key!r}")
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: field {key!r}: {exc}") from None
    return replace(default_config(), **values)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    operator: str
    n: int
    p: float
    function: str
    error_lp: float
    lambda_p: float
    mu_n: float
    t_np: float
    s_np: float
    theorem: str
    rhs_core: float

    @property
    def ratio(self) -> float | None:
        return self.error_lp / self.rhs_core if self.rhs_core > 0.0 else None

    def sort_key(self):
        return (self.experiment, self.operator, self.n, self.p, self.function, self.theorem)

    def csv_record(self) -> list[str]:
        err_s, rhs_s = fmt(self.error_lp), fmt(self.rhs_core)
        if self.rhs_core > 0.0:
            # Divide the rounded field values and store the quotient at
            # round-trip precision, so ratio == error_lp/rhs_core holds
            # exactly for anyone re-parsing the file.
            ratio_s = repr(float(err_s) / float(rhs_s))
        else:
            ratio_s = ""
        return [
            self.experiment,
            self.operator,
            str(self.n),
            format_p(self.p),
            self.function,
            err_s,
            fmt(self.lambda_p),
            fmt(self.mu_n),
            fmt(self.t_np),
            fmt(self.s_np),
            self.theorem,
            rhs_s,
            ratio_s,
        ]


@dataclass
class GroupSummary:
    theorem: str
    operator: str
    function: str
    p: float
    fitted_constant: float
    first_quartile: float
    last_quartile: float
    stable: bool
    slope: float | None
    hard_failures: list[int]


@dataclass
class RunResult:
    exit_code: int
    csv_path: Path | None
    report_path: Path | None
    rows: list[ResultRow]
    summaries: list[GroupSummary]
    warnings: list[str]
    axiom_failures: int


def _summarize(rows: list[ResultRow]) -> tuple[list[GroupSummary], list[str]]:
    groups: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.theorem, row.operator, row.function, row.p), []).append(row)
    summaries, warnings = [], []
    for (theorem, operator, function, p), cell in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], kv[0][3])
    ):
        cell.sort(key=lambda r: r.n)
        ratios = [r.ratio for r in cell if r.ratio is not None]
        fitted = max(ratios, default=0.0)
        # Zero-error points satisfy any constant; only informative ratios
        # enter the stability quartiles.
        live = [r.ratio for r in cell if r.ratio is not None and r.error_lp > HARD_ZERO]
        if live:
            k = max(1, math.ceil(len(live) / 4))
            first, last = max(live[:k]), max(live[-k:])
            stable = last <= STABILITY_FACTOR * first + STABILITY_EPS
        else:
            first = last = 0.0
            stable = True
        hard = [r.n for r in cell if r.error_lp > HARD_ZERO and r.rhs_core <= 0.0]
        try:
            slope = rate_estimate([(r.n, r.error_lp) for r in cell])
        except InsufficientDataError as exc:
            slope = None
            warnings.append(f"rate estimate skipped for {theorem}/{operator}/{function}/p={format_p(p)}: {exc}")
        except ValueError as exc:
            slope = None
            warnings.append(f"rate estimate failed for {theorem}/{operator}/{function}/p={format_p(p)}: {exc}")
        summaries.append(
            GroupSummary(theorem, operator, function, p, fitted, first, last, stable, slope, hard)
        )
    return summaries, warnings


def _render_report(config: ExperimentConfig, axiom_outcomes, summaries, warnings) -> str:
    lines = []
    lines.append("korovkin experiment report")
    lines.append("==========================")
    lines.append(f"operators: {','.join(config.operators)}")
    lines.append(f"degrees: {','.join(str(n) for n in config.degrees)}")
    lines.append(f"exponents: {','.join(format_p(p) for p in config.exponents)}")
    lines.append(f"functions: {','.join(config.functions)}")
    lines.append(f"theorems: {','.join(config.theorems)}")
    lines.append(
        f"grid_m: {config.grid_m}  sup_samples: {config.sup_samples}  "
        f"choquet_samples: {config.choquet_samples}  seed: {config.seed}"
    )
    lines.append("")
    if axiom_outcomes:
        lines.append(f"axiom suite (seed={config.seed}):")
        for out in axiom_outcomes:
            status = "pass" if out.ok else "FAIL"
            lines.append(
                f"  {out.axiom:<24} {out.kind:<20} {out.trials - out.failures}/{out.trials} {status}"
                f"  worst={fmt(out.worst)}"
            )
        lines.append("")
    lines.append("fitted constants (lhs <= K * rhs_core over the degree sweep):")
    lines.append("  theorem    operator             p     function   fitted_K"
                 "       firstq         lastq          stable")
    for s in summaries:
        lines.append(
            f"  {s.theorem:<10} {s.operator:<20} {format_p(s.p):<5} {s.function:<10} "
            f"{fmt(s.fitted_constant):<14} {fmt(s.first_quartile):<14} {fmt(s.last_quartile):<14} "
            f"{'yes' if s.stable else 'NO'}"
        )
    lines.append("")
    lines.append("rate slopes (log-log fit of error against n):")
    for s in summaries:
        if s.slope is not None:
            lines.append(
                f"  {s.theorem:<10} {s.operator:<20} {format_p(s.p):<5} {s.function:<10} "
                f"slope={fmt(s.slope)}"
            )
    hard = [s for s in summaries if s.hard_failures]
    lines.append("")
    if hard:
        lines.append("hard bound failures (error > 0 with rhs_core = 0):")
        for s in hard:
            lines.append(
                f"  {s.theorem}/{s.operator}/{s.function}/p={format_p(s.p)} at n={s.hard_failures}"
            )
    else:
        lines.append("hard bound failures: none")
    if warnings:
        lines.append("")
        lines.append("warnings:")
        for w in warnings:
            lines.append(f"  {w}")
    unstable = [s for s in summaries if not s.stable]
    axiom_bad = [o for o in (axiom_outcomes or []) if not o.ok]
    verdict = "PASS" if not (hard or unstable or axiom_bad) else "FAIL"
    lines.append("")
    lines.append(f"overall: {verdict}")
    lines.append("")
    return "\n".join(lines)


def run(config: ExperimentConfig, *, quiet: bool = False) -> RunResult:
    """Execute the sweep described by ``config``; write CSV and report."""
    problems = config.validate()
    if problems:
        for msg in problems:
            print(f"config error: {msg}", file=sys.stderr)
        return RunResult(2, None, None, [], [], problems, 0)

    registry = suite_by_id()
    grid = Grid(config.grid_m)
    # Index computation has a finer floor than the norm grid.
    indices_grid = grid if config.grid_m >= 1024 else Grid(1024)
    kwargs = dict(sup_samples=config.sup_samples, choquet_samples=config.choquet_samples)

    axiom_outcomes = run_axiom_suite(seed=config.seed, trials=200, kinds=config.operators, **kwargs)
    axiom_failures = sum(o.failures for o in axiom_outcomes)

    rows: list[ResultRow] = []
    for kind in config.operators:
        for n in config.degrees:
            op = OperatorSpec(kind, n)
            for p in config.exponents:
                idx = compute_indices(op, p, indices_grid, **kwargs)
                for fid in config.functions:
                    f = registry[fid]
                    for theorem in config.theorems:
                        if check_compatibility(theorem, kind, f, p) is not None:
                            continue
                        bp = theorem_bound(theorem, op, f, p, grid, **kwargs)
                        rows.append(
                            ResultRow(
                                experiment="bounds",
                                operator=kind,
                                n=n,
                                p=p,
                                function=fid,
                                error_lp=bp.lhs,
                                lambda_p=idx.lambda_p,
                                mu_n=idx.mu_n,
                                t_np=idx.t_np,
                                s_np=idx.s_np,
                                theorem=theorem,
                                rhs_core=bp.rhs_core,
                            )
                        )
    rows.sort(key=ResultRow.sort_key)

    summaries, warnings = _summarize(rows)

    outdir = Path(config.output_path)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "results.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_record())

    report = _render_report(config, axiom_outcomes, summaries, warnings)
    report_path = outdir / "report.txt"
    report_path.write_text(report)

    hard = [s for s in summaries if s.hard_failures]
    unstable = [s for s in summaries if not s.stable]
    exit_code = 0 if not (hard or unstable or axiom_failures) else 1
    if not quiet:
        print(f"wrote {csv_path} ({len(rows)} rows) and {report_path}")
        for w in warnings:
            print(f"warning: {w}")
        print(f"axiom failures: {axiom_failures}; unstable cells: {len(unstable)}; "
              f"hard failures: {len(hard)}")
        print(f"overall: {'PASS' if exit_code == 0 else 'FAIL'}")
    return RunResult(exit_code, csv_path, report_path, rows, summaries, warnings, axiom_failures)


def verify_axioms(seed: int = 0, trials: int = 200, *, quiet: bool = False) -> int:
    """Run the axiom property suite; exit status 0 iff every axiom holds."""
    outcomes = run_axiom_suite(seed=seed, trials=trials)
    failures = 0
    for out in outcomes:
        status = "pass" if out.ok else "FAIL"
        failures += out.failures
        if not quiet:
            print(
                f"{out.axiom:<24} {out.kind:<20} {out.trials - out.failures}/{out.trials} "
                f"{status}  worst={fmt(out.worst)}"
            )
    if not quiet:
        print("all axioms passed" if failures == 0 else f"{failures} axiom trials failed")
    return 0 if failures == 0 else 1


def load_rows(csv_path: str | Path) -> list[ResultRow]:
    rows = []
    with Path(csv_path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {csv_path}: {reader.fieldnames}")
        for rec in reader:
            rows.append(
                ResultRow(
                    experiment=rec["experiment"],
                    operator=rec["operator"],
                    n=int(rec["n"]),
                    p=_parse_p(rec["p"]),
                    function=rec["function"],
                    error_lp=float(rec["error_lp"]),
                    lambda_p=float(rec["lambda_p"]),
                    mu_n=float(rec["mu_n"]),
                    t_np=float(rec["t_np"]),
                    s_np=float(rec["s_np"]),
                    theorem=rec["theorem"],
                    rhs_core=float(rec["rhs_core"]),
                )
            )
    return rows


def report_from_csv(csv_path: str | Path, *, quiet: bool = False) -> int:
    """Re-derive fitted constants and slopes from an existing CSV."""
    rows = load_rows(csv_path)
    summaries, warnings = _summarize(rows)
    hard = [s for s in summaries if s.hard_failures]
    if not quiet:
        print(f"{len(rows)} rows from {csv_path}")
        print("theorem    operator             p     function   fitted_K        stable  slope")
        for s in summaries:
            slope = "-" if s.slope is None else fmt(s.slope)
            print(
                f"{s.theorem:<10} {s.operator:<20} {format_p(s.p):<5} {s.function:<10} "
                f"{fmt(s.fitted_constant):<15} {'yes' if s.stable else 'NO':<7} {slope}"
            )
        for w in warnings:
            print(f"warning: {w}")
        print("hard bound failures: " + (str(len(hard)) if hard else "none"))
    return 0 if not hard else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="korovkin",
        description="Empirical verification harness for monotone sublinear approximation bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment sweep")
    p_run.add_argument("--config", help="path to a key=value config file (defaults built in)")

    p_ax = sub.add_parser("verify-axioms", help="run the operator axiom property suite")
    p_ax.add_argument("--seed", type=int, default=0)
    p_ax.add_argument("--trials", type=int, default=200)

    p_rep = sub.add_parser("report", help="re-derive constants and slopes from a CSV")
    p_rep.add_argument("--csv", required=True)

    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            config = parse_config(args.config) if args.config else default_config()
        except (OSError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        return run(config).exit_code
    if args.command == "verify-axioms":
        return verify_axioms(seed=args.seed, trials=args.trials)
    return report_from_csv(args.csv)


if __name__ == "__main__":
    sys.exit(main())
