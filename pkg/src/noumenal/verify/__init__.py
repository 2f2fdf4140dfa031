"""Executable catalogue of the laws a theory and its local model must obey."""
from __future__ import annotations

from ..core import SamplingBudget
from ..errors import NotDisjointError
from ..lattice import mutually_disjoint
from .context import ModelContext, TheoryContext
from .model_checks import CHECKS as MODEL_CHECKS
from .runner import AxiomCheck, CheckResult, Plan, VerificationReport, run_catalogue, run_check
from .theory_checks import CHECKS as THEORY_CHECKS
from .theory_checks import generalized_nsp_plan

CATALOGUE: list[AxiomCheck] = THEORY_CHECKS + MODEL_CHECKS


def catalogue_ids() -> list[str]:
    return sorted(c.id for c in CATALOGUE)


def verify_theory(theory, budget: SamplingBudget | None = None) -> VerificationReport:
    budget = budget or SamplingBudget()
    return run_catalogue(THEORY_CHECKS, TheoryContext(theory, budget), budget, theory.name)


def verify_construction(model, budget: SamplingBudget | None = None) -> VerificationReport:
    budget = budget or SamplingBudget()
    return run_catalogue(MODEL_CHECKS, ModelContext(model, budget), budget, f"model of {model.theory.name}")


def verify_all(model, budget: SamplingBudget | None = None) -> VerificationReport:
    """Theory checks followed by construction checks, as one report."""
    budget = budget or SamplingBudget()
    ctx = ModelContext(model, budget)
    return run_catalogue(CATALOGUE, ctx, budget, model.theory.name)


def verify_no_signalling_generalized(theory, parts, budget: SamplingBudget | None = None) -> VerificationReport:
    parts = tuple(parts)
    if not mutually_disjoint(parts):
        raise NotDisjointError("the parts of a generalized no-signalling check must be mutually disjoint")
    budget = budget or SamplingBudget()
    ctx = TheoryContext(theory, budget)
    names = ",".join(p.name() for p in parts)
    check = AxiomCheck(f"S4.5.nsp.generalized[{names}]",
                       "pi_B((prod U^A) rho^X) = U^B pi_B(rho^X) for each given part B",
                       "theory", lambda c: generalized_nsp_plan(c, parts))
    return VerificationReport(theory.name, [run_check(check, ctx, budget)])


__all__ = [
    "AxiomCheck", "CATALOGUE", "CheckResult", "MODEL_CHECKS", "Plan", "THEORY_CHECKS",
    "VerificationReport", "catalogue_ids", "verify_all", "verify_construction",
    "verify_no_signalling_generalized", "verify_theory",
]
