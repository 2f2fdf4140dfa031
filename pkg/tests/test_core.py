import numpy as np
import pytest

from noumenal import QuantumTheory, SamplingBudget
from noumenal.core import faithfulize
from noumenal.errors import BudgetError, NotDisjointError, SystemMismatchError
from noumenal.quantum import GATES
from noumenal.verify import THEORY_CHECKS
from noumenal.verify.context import TheoryContext
from noumenal.verify.runner import run_check


@pytest.mark.parametrize("kwargs", [
    {"mode": "random"},
    {"sample_count": 0},
    {"seed": -1},
    {"seed": 2**64},
    {"tolerance": -1e-3},
])
def test_budget_rejects_invalid_values(kwargs):
    with pytest.raises(ValueError):
        SamplingBudget(**kwargs)


def test_embed_and_product_all(c22):
    u = c22.universe
    flip = c22.op(u.system(0), [1, 0])
    assert c22.embed(flip) == c22.product(flip, c22.identity(u.system(1)))
    assert c22.embed(c22.identity(u.full)) == c22.identity(u.full)
    assert c22.product_all([]) == c22.identity(u.empty)
    assert c22.product_all([flip, c22.op(u.system(1), [1, 0])]).table == (3, 2, 1, 0)


def test_contract_guards(c22):
    u = c22.universe
    with pytest.raises(SystemMismatchError):
        c22.compose(c22.identity(u.system(0)), c22.identity(u.system(1)))
    with pytest.raises(NotDisjointError):
        c22.product(c22.identity(u.full), c22.identity(u.system(0)))


def test_is_operation_respects_declared_group(c22_product):
    swap = c22_product.op(c22_product.universe.full, [0, 2, 1, 3])
    assert not c22_product.is_operation(swap)
    assert c22_product.is_operation(c22_product.identity(c22_product.universe.full))


def _faithful_result(theory, budget):
    check = next(c for c in THEORY_CHECKS if c.id == "S3.def2.faithful")
    return run_check(check, TheoryContext(theory, budget), budget)


def test_faithfulize_repairs_phase_sensitive_theory():
    budget = SamplingBudget("sampled", sample_count=40, seed=9)
    raw = QuantumTheory(1, phase_sensitive=True, name="raw")
    assert _faithful_result(raw, budget).status == "fail"
    quotient = faithfulize(raw, budget)
    z = raw.gate("Z", 0)
    minus_z = raw.unitary(raw.universe.full, -GATES["Z"])
    assert raw.op_distance(z, minus_z) > 1
    assert quotient.op_distance(z, minus_z) < 1e-12
    assert _faithful_result(quotient, budget).status == "pass"


def test_faithfulize_exhaustive_needs_enumerable_base():
    with pytest.raises(BudgetError):
        faithfulize(QuantumTheory(1), SamplingBudget("exhaustive"))


def test_faithful_quotient_of_classical_is_identity_map(c22):
    q = faithfulize(c22)
    assert len(q.operations(c22.universe.full)) == 24
    assert q.op_distance(c22.identity(c22.universe.full), c22.identity(c22.universe.full)) == 0.0
