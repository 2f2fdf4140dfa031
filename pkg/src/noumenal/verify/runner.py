"""Check definitions, the strategy selection and report assembly.

A check turns a context (a theory or a constructed model plus a budget)
into a :class:`Plan`: named arguments, a predicate, an exhaustive
enumeration when the domain is finite, and a sampler otherwise.  The
predicate returns ``True``/``False``, a float residual compared against the
tolerance, or ``None`` when the case does not satisfy the law's premise.
"""
from __future__ import annotations

import json
import time
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from ..core import SamplingBudget
from ..errors import BudgetError, NoumenalError

Arg = tuple[str, str]  # (name, kind)


@dataclass
class Plan:
    args: tuple[Arg, ...]
    predicate: Callable[..., Any]
    enumerate: Callable[[], Iterable[tuple]] | None = None
    count: int | None = None
    sample: Callable[[np.random.Generator], tuple] | None = None
    tolerance: float | None = None


@dataclass(frozen=True)
class AxiomCheck:
    id: str
    statement: str
    applies_to: str  # "theory" or "model"
    plan: Callable[[Any], "Plan | str"]


@dataclass
class CheckResult:
    id: str
    statement: str
    status: str
    strategy: str
    cases: int = 0
    vacuous: int = 0
    max_residual: float | None = None
    tolerance: float = 0.0
    seed: int = 0
    witness: dict | None = None
    reason: str | None = None
    wall_time: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "id": self.id,
            "statement": self.statement,
            "status": self.status,
            "strategy": self.strategy,
            "cases": self.cases,
            "vacuous": self.vacuous,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "witness": self.witness,
            "reason": self.reason,
        }
        if include_timing:
            d["wall_time"] = round(self.wall_time, 6)
        return d


@dataclass
class VerificationReport:
    subject: str
    results: list[CheckResult] = field(default_factory=list)

    def __post_init__(self):
        self.results = sorted(self.results, key=lambda r: r.id)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.status == "fail"]

    def result(self, check_id: str) -> CheckResult:
        for r in self.results:
            if r.id == check_id:
                return r
        raise KeyError(check_id)

    def merged(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(f"{self.subject}+{other.subject}", self.results + other.results)

    @property
    def max_residual(self) -> float | None:
        vals = [r.max_residual for r in self.results if r.max_residual is not None]
        return max(vals) if vals else None

    def to_dict(self, include_timing: bool = False) -> dict:
        counts = {s: sum(r.status == s for r in self.results) for s in ("pass", "fail", "skipped")}
        return {
            "subject": self.subject,
            "passed": self.passed,
            "summary": counts,
            "max_residual": self.max_residual,
            "checks": [r.to_dict(include_timing) for r in self.results],
        }

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def table(self) -> str:
        rows = [("check", "status", "strategy", "cases", "max residual", "time")]
        for r in self.results:
            res = "-" if r.max_residual is None else f"{r.max_residual:.2e}"
            rows.append((r.id, r.status, r.strategy, str(r.cases), res, f"{r.wall_time:.2f}s"))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        for r in self.results:
            if r.status != "pass" and r.reason:
                lines.append(f"{r.id}: {r.reason}")
        return "\n".join(lines)


def check_rng(seed: int, check_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(check_id.encode())])


def _evaluate(plan: Plan, args: tuple, tol: float):
    """Return (outcome, residual, error) with outcome in pass / fail / vacuous."""
    try:
        out = plan.predicate(*args)
    except BudgetError:
        raise
    except NoumenalError as e:
        return "fail", None, f"{type(e).__name__}: {e}"
    if out is None:
        return "vacuous", None, None
    if isinstance(out, (bool, np.bool_)):
        return ("pass" if out else "fail"), None, None
    r = float(out)
    return ("pass" if r <= tol else "fail"), r, None


def _shrink(ctx, plan: Plan, args: tuple, tol: float) -> tuple:
    """Greedily replace arguments by identity-like values while the case keeps failing."""
    args = list(args)
    for i, (_, kind) in enumerate(plan.args):
        for cand in ctx.simpler(kind, args[i]):
            trial = tuple(args[:i] + [cand] + args[i + 1:])
            try:
                outcome = _evaluate(plan, trial, tol)[0]
            except BudgetError:
                continue
            if outcome == "fail":
                args[i] = cand
                break
    return tuple(args)


def run_check(check: AxiomCheck, ctx, budget: SamplingBudget) -> CheckResult:
    start = time.perf_counter()
    res = CheckResult(check.id, check.statement, "pass", "exhaustive", seed=budget.seed, tolerance=budget.tolerance)
    try:
        plan = check.plan(ctx)
    except BudgetError as e:
        plan = f"budget: {e}"
    if isinstance(plan, str):
        res.status, res.strategy, res.reason = "skipped", "none", plan
        res.wall_time = time.perf_counter() - start
        return res
    tol = budget.tolerance if plan.tolerance is None else plan.tolerance
    res.tolerance = tol
    exhaustive = (budget.mode == "exhaustive" and plan.enumerate is not None
                  and plan.count is not None and plan.count <= budget.max_cases)
    if exhaustive:
        cases = plan.enumerate()
    elif plan.sample is not None:
        rng = check_rng(budget.seed, check.id)
        res.strategy = "sampled"
        cases = (plan.sample(rng) for _ in range(budget.sample_count))
    else:
        res.status, res.strategy = "skipped", "none"
        res.reason = f"domain of {plan.count} cases exceeds the budget and no sampler is available"
        res.wall_time = time.perf_counter() - start
        return res
    try:
        for args in cases:
            res.cases += 1
            outcome, resid, err = _evaluate(plan, args, tol)
            if resid is not None:
                res.max_residual = resid if res.max_residual is None else max(res.max_residual, resid)
            if outcome == "vacuous":
                res.vacuous += 1
            elif outcome == "fail":
                res.status = "fail"
                small = _shrink(ctx, plan, args, tol)
                _, sresid, serr = _evaluate(plan, small, tol)
                res.witness = {name: ctx.serialize(kind, v) for (name, kind), v in zip(plan.args, small)}
                if sresid is not None:
                    res.witness["residual"] = sresid
                if serr or err:
                    res.witness["error"] = serr or err
                res.reason = "counterexample found"
                break
    except BudgetError as e:
        res.status, res.reason = "skipped", f"budget: {e}"
    if res.status == "pass" and res.cases and res.vacuous == res.cases:
        res.status, res.reason = "fail", "premise never held; the check is vacuous"
    res.wall_time = time.perf_counter() - start
    return res


def run_catalogue(checks: Iterable[AxiomCheck], ctx, budget: SamplingBudget, subject: str) -> VerificationReport:
    return VerificationReport(subject, [run_check(c, ctx, budget) for c in checks])
