import itertools

import numpy as np
import pytest

from noumenal import LocalRealisticModel, QuantumTheory, SamplingBudget
from noumenal.construction import build_local_model
from noumenal.errors import (
    ConstructionRefused,
    IncompatibleClassesError,
    NotASubsystemError,
    NotDisjointError,
    SystemMismatchError,
)
from noumenal.quantum import bell_vectors
from noumenal.sabotage import default_base, sabotaged_theory


def test_quantum_oracle_spot_checks(q2, q2_model):
    u = q2.universe
    ident = q2.identity(u.full)
    z_first = q2.embed(q2.gate("Z", 0))
    cnot = q2.gate("CNOT", 0, 1)
    assert q2_model.equivalent(z_first, ident, u.system(1))
    assert not q2_model.equivalent(z_first, ident, u.system(0))
    assert not q2_model.equivalent(cnot, ident, u.system(0))
    assert not q2_model.equivalent(cnot, ident, u.system(1))
    assert q2_model.equivalent(cnot, ident, u.empty)


def test_classical_cnot_class_differs_from_identity_on_control(c22, c22_model):
    from noumenal.classical import classical_cnot
    u = c22.universe
    assert not c22_model.equivalent(classical_cnot(c22), c22.identity(u.full), u.system(0))
    assert c22_model.equivalent(classical_cnot(c22), c22.identity(u.full), u.empty)


def test_local_operation_leaves_remote_class_alone(q2, q2_model):
    rng = np.random.default_rng(4)
    u = q2.universe
    w = q2.sample_operation(u.full, rng)
    local = q2_model.pad(q2.sample_operation(u.system(0), rng))
    before = q2_model.noumenal(w, u.system(1))
    after = q2_model.noumenal(q2.compose(local, w), u.system(1))
    assert before == after
    assert q2_model.class_distance(before, after) < 1e-12


def test_phi_recovers_reference_state(q2, q2_model):
    rho = q2.sample_state(q2.universe.full, np.random.default_rng(5))
    out = q2_model.phi(rho, q2_model.initial(q2.universe.full))
    assert q2.state_distance(out, rho) < 1e-12
    with pytest.raises(SystemMismatchError):
        q2_model.phi(q2.project(rho, q2.universe.system(0)), q2_model.initial(q2.universe.system(0)))


def test_phi_commutes_with_action(q2, q2_model):
    rng = np.random.default_rng(6)
    a = q2.universe.system(1)
    w = q2.sample_operation(q2.universe.full, rng)
    v = q2.sample_operation(a, rng)
    rho = q2.sample_state(q2.universe.full, rng)
    n = q2_model.noumenal(w, a)
    lhs = q2_model.phi(rho, q2_model.act(v, n))
    rhs = q2.act(v, q2_model.phi(rho, n))
    assert q2.state_distance(lhs, rhs) < 1e-12


def test_bell_states_have_distinct_global_classes(q2, q2_model):
    u = q2.universe
    h, cnot = q2.embed(q2.gate("H", 0)), q2.gate("CNOT", 0, 1)
    x1, z0 = q2.embed(q2.gate("X", 1)), q2.embed(q2.gate("Z", 0))
    bell = q2.compose(cnot, h)
    preps = [bell, q2.compose(z0, bell), q2.compose(x1, bell), q2.compose(z0, q2.compose(x1, bell))]
    zero = q2.basis(u.full, "00")
    for w, psi in zip(preps, bell_vectors().values()):
        assert q2.state_distance(q2.act(w, zero), q2.pure(u.full, psi)) < 1e-12
    classes = [q2_model.noumenal(w, u.full) for w in preps]
    for x, y in itertools.combinations(classes, 2):
        assert x != y
    for a in u.singletons():
        marg = [q2_model.project(c, a) for c in classes]
        assert all(q2.state_distance(q2_model.phi(zero, m), q2.density(a, np.eye(2) / 2)) < 1e-12 for m in marg)


def test_join_of_projections_recovers_class(q2, q2_model):
    rng = np.random.default_rng(7)
    u = q2.universe
    a, b = u.system(0), u.system(1)
    # a product of local operations: the join is exact for these
    w = q2.embed(q2.product(q2.sample_operation(a, rng), q2.sample_operation(b, rng)))
    n = q2_model.noumenal(w, u.full)
    joined = q2_model.join(q2_model.project(n, a), q2_model.project(n, b))
    assert joined == n


def test_quantum_join_of_entangling_classes(q2, q2_model):
    rng = np.random.default_rng(8)
    u = q2.universe
    a, b = u.system(0), u.system(1)
    w1 = q2.sample_operation(u.full, rng)
    local = q2.product(q2.sample_operation(a, rng), q2.sample_operation(b, rng))
    w2 = q2.compose(local, w1)
    j = q2_model.join(q2_model.noumenal(w1, a), q2_model.noumenal(w2, b))
    assert q2_model.project(j, a) == q2_model.noumenal(w1, a)
    assert q2_model.project(j, b) == q2_model.noumenal(w2, b)
    # a generic pair differs by an entangling unitary, so no common representative exists
    w3 = q2.sample_operation(u.full, rng)
    with pytest.raises(IncompatibleClassesError):
        q2_model.join(q2_model.noumenal(w1, a), q2_model.noumenal(w3, b))


def test_incompatible_classical_classes_refuse_to_join(c22, c22_model):
    u = c22.universe
    a, b = u.system(0), u.system(1)
    ops = c22.operations(u.full)
    compatible = incompatible = 0
    for w1, w2 in itertools.product(ops, repeat=2):
        n1, n2 = c22_model.noumenal(w1, a), c22_model.noumenal(w2, b)
        try:
            j = c22_model.join(n1, n2)
        except IncompatibleClassesError:
            incompatible += 1
            continue
        compatible += 1
        assert c22_model.project(j, a) == n1 and c22_model.project(j, b) == n2
    # each global class pairs one s0-class with one s1-class: 24 of the 12 x 12 class pairs,
    # each pair reached by 2 x 2 representative choices
    assert compatible == 24 * 4
    assert incompatible == 24 * 24 - compatible


def test_join_rejects_overlapping_systems(c22_model, c22):
    n = c22_model.initial(c22.universe.system(0))
    with pytest.raises(NotDisjointError):
        c22_model.join(n, n)


def test_project_and_act_guards(c22, c22_model):
    u = c22.universe
    n = c22_model.initial(u.system(0))
    with pytest.raises(NotASubsystemError):
        c22_model.project(n, u.full)
    with pytest.raises(SystemMismatchError):
        c22_model.act(c22.identity(u.system(1)), n)
    with pytest.raises(SystemMismatchError):
        c22_model.noumenal(c22.identity(u.system(0)), u.system(0))


def test_join_all_of_nothing_is_empty_class(c22_model, c22):
    assert c22_model.join_all([]).system == c22.universe.empty


def test_augmented_join_needs_matching_reference(c22, c22_model):
    u = c22.universe
    r0, r1 = c22.state(u.full, [0, 0]), c22.state(u.full, [1, 0])
    s1 = c22_model.augmented(c22_model.initial(u.system(0)), r0)
    s2 = c22_model.augmented(c22_model.initial(u.system(1)), r1)
    with pytest.raises(IncompatibleClassesError):
        c22_model.join_augmented(s1, s2)
    joined = c22_model.join_augmented(s1, c22_model.augmented(c22_model.initial(u.system(1)), r0))
    assert c22.states_equal(c22_model.phi_prime(joined), r0)


def test_quantum_classes_are_not_hashable(q2_model, q2):
    with pytest.raises(TypeError):
        hash(q2_model.initial(q2.universe.full))


def test_canonical_representative_is_coset_minimum(c22, c22_model):
    u = c22.universe
    for w in c22.operations(u.full):
        n = c22_model.noumenal(w, u.system(0))
        canon = c22_model.canonical_representative(n)
        assert c22_model.equivalent(canon, w, u.system(0))
        coset = [c22.compose(h, w) for h in c22_model.stabilizer(u.system(0))]
        assert c22.op_key(canon) == min(c22.op_key(x) for x in coset)


def test_coset_table_shape(c22_model):
    table = c22_model.coset_table()
    counts = [s["class_count"] for s in table["systems"]]
    assert counts == [1, 12, 12, 24]
    for s in table["systems"]:
        assert sum(c["members"] for c in s["classes"]) == s["group_order"] == 24
        assert s["group_order"] == s["class_count"] * s["stabilizer_order"]


def test_build_refuses_broken_theory():
    broken = sabotaged_theory("swapped_product", default_base("classical"))
    with pytest.raises(ConstructionRefused) as err:
        build_local_model(broken)
    assert "S5.req3.interchange" in str(err.value)
    forced = build_local_model(broken, force=True)
    assert forced.forced and not forced.report.passed


def test_build_accepts_sound_theory(c22):
    model = build_local_model(c22)
    assert isinstance(model, LocalRealisticModel) and not model.forced
    q = build_local_model(QuantumTheory(1), SamplingBudget("sampled", sample_count=30, seed=1))
    assert q.report.passed
