"""Command-line front end.

    fuzzcalc solve --model model.json --out traj.csv [--variant paper|rederived|both]
    fuzzcalc check --model model.json
    fuzzcalc reproduce-paper

Exit codes: 0 success, 1 failed verdict (check / reproduce-paper),
2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FuzzError, NumericError
from .fivp import (
    DEFAULT_T,
    DEFAULT_T_STEP,
    AnalysisReport,
    CaseTag,
    DecayVariant,
    FivpModel,
    analyze,
    solve_decay_closed,
)
from .fuzzy import DEFAULT_ALPHA_N, DEFAULT_TOL, AlphaGrid, validate_fuzzy
from .seikkala import CONDITIONS, LevelFunctionField, seikkala_verdict, time_derivative

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

CSV_HEADER = "t,alpha,y1,y2,dy1_dalpha,dy2_dalpha,y1_prime,y2_prime"
ALPHA_N_ENV = "FUZZCALC_ALPHA_N"
VARIANTS = ("paper", "rederived", "both")


@dataclass(frozen=True)
class ModelConfig:
    k: float | tuple
    c: float | tuple
    T: float = DEFAULT_T
    t_step: float = DEFAULT_T_STEP
    alpha_n: int = DEFAULT_ALPHA_N
    decay_variant: str = "both"
    tolerance: float = DEFAULT_TOL

    def to_model(self) -> FivpModel:
        return FivpModel.triangular(self.k, self.c, self.T, self.t_step, self.alpha_n)

    def variants(self, override: str | None = None) -> tuple[DecayVariant, ...]:
        choice = override or self.decay_variant
        if choice == "both":
            return (DecayVariant.PAPER, DecayVariant.REDERIVED)
        return (DecayVariant(choice),)


def _default_alpha_n() -> int:
    raw = os.environ.get(ALPHA_N_ENV)
    if raw is None:
        return DEFAULT_ALPHA_N
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"not an integer: {raw!r}", ALPHA_N_ENV) from None
    if n < 1:
        raise ConfigError("must be a positive integer", ALPHA_N_ENV)
    return n


def _fuzzy_field(name, value):
    if isinstance(value, bool):
        raise ConfigError("expected a number or a triple [left, peak, right]", name)
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ConfigError("must be finite", name)
        return float(value)
    if isinstance(value, list) and len(value) == 3 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        left, peak, right = map(float, value)
        if not all(map(math.isfinite, (left, peak, right))):
            raise ConfigError("must be finite", name)
        if not (left <= peak <= right):
            raise ConfigError(f"triangular order violated, need left <= peak <= right, got {value}", name)
        return (left, peak, right)
    raise ConfigError("expected a number or a triple [left, peak, right]", name)


def _positive(name, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number", name)
    if integer and int(value) != value:
        raise ConfigError("expected an integer", name)
    if not (math.isfinite(value) and value > 0):
        raise ConfigError(f"must be positive, got {value}", name)
    return int(value) if integer else float(value)


def parse_model_config(doc) -> ModelConfig:
    if not isinstance(doc, dict):
        raise ConfigError("model config must be a JSON object")
    known = {"k", "c", "T", "t_step", "alpha_n", "decay_variant", "tolerance"}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError("unknown field", unknown[0])
    for required in ("k", "c"):
        if required not in doc:
            raise ConfigError("missing required field", required)
    T = _positive("T", doc.get("T", DEFAULT_T))
    t_step = _positive("t_step", doc.get("t_step", DEFAULT_T_STEP))
    if t_step > T:
        raise ConfigError(f"must not exceed T = {T}", "t_step")
    variant = doc.get("decay_variant", "both")
    if variant not in VARIANTS:
        raise ConfigError(f"must be one of {', '.join(VARIANTS)}", "decay_variant")
    alpha_n = _positive("alpha_n", doc["alpha_n"], integer=True) if "alpha_n" in doc else _default_alpha_n()
    return ModelConfig(
        k=_fuzzy_field("k", doc["k"]),
        c=_fuzzy_field("c", doc["c"]),
        T=T,
        t_step=t_step,
        alpha_n=alpha_n,
        decay_variant=variant,
        tolerance=_positive("tolerance", doc.get("tolerance", DEFAULT_TOL)),
    )


def load_model_config(path) -> ModelConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_model_config(doc)


# --------------------------------------------------------------------------
# trajectories


def trajectory_rows(f: LevelFunctionField, tgrid, grid: AlphaGrid) -> np.ndarray:
    """Rows ``(t, alpha, y1, y2, dy1/da, dy2/da, y1', y2')`` ordered by (t, alpha)."""
    tgrid = np.asarray(tgrid, dtype=float)
    T, A = np.meshgrid(tgrid, grid.levels, indexing="ij")
    y1, y2 = f.values(T, A)
    da1, da2 = f.dalpha(T, A, h=float(grid.spacing.min()))
    d1, d2 = time_derivative(f, T, A)
    cols = [np.broadcast_to(v, T.shape).ravel() for v in (T, A, y1, y2, da1, da2, d1, d2)]
    rows = np.column_stack(cols)
    if not np.all(np.isfinite(rows)):
        raise NumericError(f"{f.label or 'field'}: non-finite trajectory values")
    return rows


def write_csv(path, rows: np.ndarray):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows.tolist():
            fh.write(",".join(map(repr, row)) + "\n")


def read_csv(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header: {header!r}")
        return np.array([[float(x) for x in line.split(",")] for line in fh if line.strip()])


# --------------------------------------------------------------------------
# summaries


def _witness_dict(w):
    if w is None:
        return None
    return {"t": w.t, "alpha": [w.alpha_lo, w.alpha_hi], "condition": w.condition,
            "magnitude": w.magnitude}


def _field_summary(fa) -> dict:
    v = fa.verdict
    return {
        "kind": fa.field.kind,
        "differentiable": v.differentiable,
        "value_valid": v.value_valid,
        "derivative_valid": v.derivative_valid,
        "failed_conditions": v.failed_conditions(),
        "witness_count": len(v.witnesses),
        "worst_witnesses": {c: _witness_dict(v.worst(c)) for c in v.failed_conditions()},
        "max_abs_residual_1": fa.residual.max_abs_residual_1 if fa.residual else None,
        "max_abs_residual_2": fa.residual.max_abs_residual_2 if fa.residual else None,
        "oracle_deviation": fa.oracle_deviation,
        "positivity_end": fa.positivity_end,
        "checked_t": [v.tgrid[0], v.tgrid[-1]],
    }


def summarize(report: AnalysisReport, config: ModelConfig | None = None) -> dict:
    return {
        "case": report.case.value,
        "differentiable": report.differentiable,
        "model": asdict(config) if config is not None else None,
        "fields": {name: _field_summary(fa) for name, fa in report.fields.items()},
        "warnings": list(report.warnings),
        "errors": {name: f"{type(e).__name__}: {e}" for name, e in report.errors.items()},
    }


def _primary_fields(report: AnalysisReport) -> list[str]:
    if report.case is CaseTag.MIXED:
        return ["oracle"]
    return [n for n in report.fields if n != "oracle"] or ["oracle"]


def _numeric_failure(report: AnalysisReport) -> NumericError | None:
    for exc in report.errors.values():
        if isinstance(exc, NumericError):
            return exc
    return None


def _csv_targets(out: Path, names: list[str]) -> dict[str, Path]:
    targets = {}
    for n, name in enumerate(names):
        targets[name] = out if n == 0 else out.with_name(f"{out.stem}-{name}{out.suffix}")
    return targets


# --------------------------------------------------------------------------
# commands


def cmd_solve(config: ModelConfig, out, variant: str | None = None, stdout=None) -> int:
    """Analyze the model, write trajectories as CSV and a JSON summary to stdout.

    The first solution field goes to ``out``; with both decay variants the
    rederived one goes next to it as ``<stem>-rederived<suffix>``.
    """
    stdout = stdout or sys.stdout
    model = config.to_model()
    with np.errstate(over="ignore", invalid="ignore"):
        report = analyze(model, config.variants(variant), config.tolerance)
        failure = _numeric_failure(report)
        if failure is not None:
            print(f"error: {failure}", file=sys.stderr)
            return EXIT_NUMERIC
        names = [n for n in _primary_fields(report) if n in report.fields]
        targets = _csv_targets(Path(out), names)
        for name, path in targets.items():
            try:
                write_csv(path, trajectory_rows(report.fields[name].field, report.tgrid, model.grid))
            except NumericError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_NUMERIC
    summary = summarize(report, config)
    summary["csv"] = {name: str(path) for name, path in targets.items()}
    json.dump(summary, stdout, indent=2, ensure_ascii=False)
    stdout.write("\n")
    return EXIT_OK


def cmd_check(config: ModelConfig, variant: str | None = None, stdout=None) -> int:
    """Print a pass/fail table per condition; exit 1 if anything fails."""
    stdout = stdout or sys.stdout
    model = config.to_model()
    tol = config.tolerance
    with np.errstate(over="ignore", invalid="ignore"):
        report = analyze(model, config.variants(variant), tol)
    failure = _numeric_failure(report)
    if failure is not None:
        print(f"error: {failure}", file=sys.stderr)
        return EXIT_NUMERIC

    ok = True
    print(f"case: {report.case.value}", file=stdout)
    print(f"{'field':<10} {'condition':<10} {'status':<6} worst witness", file=stdout)
    for name, num in (("k", model.k), ("c", model.c)):
        vr = validate_fuzzy(num, tol)
        for cond in ("i", "ii", "iv"):
            bad = [v for v in vr.violations if v.condition == cond]
            ok &= not bad
            worst = max(bad, key=lambda v: v.magnitude) if bad else None
            detail = f"index={worst.index} magnitude={worst.magnitude:.6g}" if worst else ""
            print(f"{name:<10} {cond:<10} {'FAIL' if bad else 'pass':<6} {detail}", file=stdout)
    for name, fa in report.fields.items():
        for cond in CONDITIONS:
            w = fa.verdict.worst(cond)
            ok &= w is None
            detail = (f"t={w.t:.6g} alpha=[{w.alpha_lo:.6g}, {w.alpha_hi:.6g}] "
                      f"magnitude={w.magnitude:.6g}") if w else ""
            print(f"{name:<10} {cond:<10} {'FAIL' if w else 'pass':<6} {detail}", file=stdout)
    for name, exc in report.errors.items():
        ok = False
        print(f"{name:<10} {'-':<10} {'ERROR':<6} {exc}", file=stdout)
    for msg in report.warnings:
        print(f"warning: {msg}", file=stdout)
    print("all checks passed" if ok else "some checks failed", file=stdout)
    return EXIT_OK if ok else EXIT_VERDICT


PAPER_TIMES = (0.5, 1.0, 2.0)
PAPER_DECAY = {"k": -1.0, "c": (2.0, 4.0, 6.0)}
PAPER_GROWTH = {"k": (0.5, 1.0, 1.5), "c": (2.0, 4.0, 6.0)}


def cmd_reproduce_paper(stdout=None, tol: float = 1e-9, expected_sign: float = 1.0) -> int:
    """Recompute the worked decay example and the growth verdict.

    ``expected_sign`` multiplies the expected partials; passing -1 makes
    every row mismatch, which exercises the failure path.
    """
    stdout = stdout or sys.stdout
    decay = FivpModel.triangular(**PAPER_DECAY)
    growth = FivpModel.triangular(**PAPER_GROWTH)
    field = solve_decay_closed(decay, DecayVariant.PAPER)
    alphas = decay.grid.levels
    slopes = seikkala_verdict(field, PAPER_TIMES, decay.grid, tol)

    rows = []
    for t in PAPER_TIMES:
        expected = 2.0 * math.exp(-t) * expected_sign
        d1, d2 = field.dalpha(t, alphas)
        rows.append(("dy1/dα", t, np.asarray(d1), expected))
        rows.append(("dy2/dα", t, np.asarray(d2), -expected))
        mags = np.array([w.magnitude for w in slopes.witnesses
                         if w.t == t and w.condition == "dα-y1'"])
        rows.append(("dα-y1'", t, mags if mags.size else np.array([np.nan]), -expected))

    ok = True
    print(f"{'quantity':<8} {'t':>4} {'computed':>22} {'expected':>22} {'max |delta|':>12}", file=stdout)
    for name, t, computed, expected in rows:
        delta = float(np.max(np.abs(computed - expected)))
        match = delta <= tol
        ok &= match
        shown = float(computed[np.argmax(np.abs(computed - expected))])
        print(f"{name:<8} {t:>4g} {shown:>22.15g} {expected:>22.15g} {delta:>12.3g}"
              f"{'' if match else '  MISMATCH'}", file=stdout)

    decay_report = analyze(decay, (DecayVariant.PAPER,), tol)
    paper = decay_report.fields["paper"]
    decay_ok = not paper.differentiable and "dα-y1'" in paper.verdict.failed_conditions()
    print(f"decay k=-1, c=(2,4,6): {'not ' if not paper.differentiable else ''}"
          f"Seikkala differentiable (expected: not)", file=stdout)
    growth_report = analyze(growth, (), tol)
    growth_ok = growth_report.fields["growth"].differentiable
    print(f"growth k=(0.5,1,1.5), c=(2,4,6): "
          f"{'' if growth_ok else 'not '}Seikkala differentiable (expected: differentiable)",
          file=stdout)
    ok = ok and decay_ok and growth_ok
    print("reproduction OK" if ok else "reproduction FAILED", file=stdout)
    return EXIT_OK if ok else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzcalc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a model and write trajectories as CSV")
    p.add_argument("--model", required=True, help="model config (JSON)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--variant", choices=VARIANTS, help="decay closed form(s) to use")

    p = sub.add_parser("check", help="run the fuzzy-number and Seikkala checks")
    p.add_argument("--model", required=True, help="model config (JSON)")
    p.add_argument("--variant", choices=VARIANTS, help="decay closed form(s) to use")

    sub.add_parser("reproduce-paper", help="recompute the worked growth/decay examples")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reproduce-paper":
            return cmd_reproduce_paper()
        config = load_model_config(args.model)
        if args.command == "solve":
            return cmd_solve(config, args.out, args.variant)
        return cmd_check(config, args.variant)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FuzzError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
