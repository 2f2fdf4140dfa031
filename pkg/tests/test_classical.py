import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noumenal import ClassicalTheory, LocalRealisticModel
from noumenal.classical import BlockPermutation, ClassicalTheorySpec, GroupDecl, classical_cnot
from noumenal.errors import BudgetError, NotDisjointError, TheoryLoadError


def brute_force_class_counts(n_values_per_site, full_global):
    """Count cosets H_A w by hand, without the library's group or coset code."""
    configs = list(itertools.product(range(n_values_per_site), repeat=2))
    index = {c: i for i, c in enumerate(configs)}
    local = list(itertools.permutations(range(n_values_per_site)))

    def on_sites(p0, p1):
        return tuple(index[(p0[x], p1[y])] for x, y in configs)

    if full_global:
        group = set(itertools.permutations(range(len(configs))))
    else:
        group = {on_sites(p0, p1) for p0 in local for p1 in local}
    ident = tuple(range(n_values_per_site))
    stabilizers = {
        "empty": group,
        "s0": {on_sites(ident, p) for p in local},
        "s1": {on_sites(p, ident) for p in local},
        "S": {tuple(range(len(configs)))},
    }
    counts = {}
    for name, h in stabilizers.items():
        cosets = {frozenset(tuple(hh[j] for j in w) for hh in h) for w in group}
        counts[name] = len(cosets)
    return counts


def test_full_symmetric_group_order(c22):
    assert len(c22.operations(c22.universe.full)) == 24
    assert len(c22.operations(c22.universe.system(0))) == 2


def test_product_only_group(c22_product):
    ops = c22_product.operations(c22_product.universe.full)
    assert len(ops) == 4
    assert [o.table for o in ops] == sorted(o.table for o in ops)


def test_coset_counts_match_brute_force(c22, c22_product):
    for theory, full in [(c22, True), (c22_product, False)]:
        model = LocalRealisticModel(theory)
        u = theory.universe
        got = {name: len(model.noumenal_space(a))
               for name, a in [("empty", u.empty), ("s0", u.system(0)), ("s1", u.system(1)), ("S", u.full)]}
        assert got == brute_force_class_counts(2, full)


def test_coset_counts_frozen(c22, c22_product):
    assert [len(LocalRealisticModel(c22).noumenal_space(a)) for a in c22.universe.systems()] == [1, 12, 12, 24]
    assert [len(LocalRealisticModel(c22_product).noumenal_space(a))
            for a in c22_product.universe.systems()] == [1, 2, 2, 4]


def test_composition_applies_right_argument_first(c22):
    s = c22.universe.full
    u = c22.op(s, [1, 2, 3, 0])
    v = c22.op(s, [1, 0, 2, 3])
    rho = c22.state(s, [0, 0])
    assert c22.act(c22.compose(u, v), rho) == c22.act(u, c22.act(v, rho))


def test_product_places_factors_on_their_sites(c22):
    u = c22.universe
    flip = c22.op(u.system(0), [1, 0])
    ident = c22.identity(u.system(1))
    w = c22.product(flip, ident)
    assert w.table == (2, 3, 0, 1)
    assert c22.product(ident, flip) == w
    with pytest.raises(NotDisjointError):
        c22.product(flip, flip)


def test_project_and_lift(c22):
    u = c22.universe
    rho = c22.state(u.full, [1, 0])
    assert c22.project(rho, u.system(0)).values == (1,)
    assert c22.project(rho, u.system(1)).values == (0,)
    assert c22.project(rho, u.empty).values == ()
    lifted = c22.lift_state(c22.state(u.system(1), [1]), u.full)
    assert lifted.values == (0, 1)


def test_cnot_does_not_factor_through_its_control(c22):
    u = c22.universe
    cnot = classical_cnot(c22)
    assert cnot.table == (0, 1, 3, 2)
    assert c22.factor_through_complement(cnot, u.system(0)) is None
    flip_target = c22.product(c22.identity(u.system(0)), c22.op(u.system(1), [1, 0]))
    v = c22.factor_through_complement(flip_target, u.system(0))
    assert v == c22.op(u.system(1), [1, 0])


def test_non_bijection_rejected(c22):
    with pytest.raises(TheoryLoadError):
        c22.op(c22.universe.system(0), [0, 0])


def test_generated_group_with_extra_generator():
    spec = ClassicalTheorySpec((("a", 2), ("b", 2)), {3: GroupDecl("generated", ((0, 1, 3, 2),))})
    t = ClassicalTheory(spec)
    # flips on each site plus CNOT generate the 8-element dihedral subgroup of S4
    assert len(t.operations(t.universe.full)) == 8


def test_budget_caps():
    with pytest.raises(BudgetError):
        ClassicalTheory(ClassicalTheorySpec((("a", 4), ("b", 4)), {}, max_joint_size=8))
    spec = ClassicalTheorySpec((("a", 3), ("b", 3)), {3: GroupDecl("full")}, max_joint_size=9, max_group_order=100)
    with pytest.raises(BudgetError):
        ClassicalTheory(spec).operations(ClassicalTheory(spec).universe.full)


def test_single_value_site_rejected():
    with pytest.raises(TheoryLoadError):
        ClassicalTheory(ClassicalTheorySpec((("a", 1),), {}))


perms = st.permutations(range(4)).map(tuple)


@settings(max_examples=50)
@given(perms, perms, perms)
def test_group_laws_on_global_system(x, y, z):
    t = ClassicalTheory.uniform(2, 2, full_global=True)
    s = t.universe.full
    u, v, w = (BlockPermutation(s, p) for p in (x, y, z))
    assert t.compose(u, t.compose(v, w)) == t.compose(t.compose(u, v), w)
    assert t.compose(u, t.inverse(u)) == t.identity(s)
    assert t.compose(t.identity(s), u) == u


@settings(max_examples=50)
@given(st.permutations(range(3)), st.permutations(range(3)), st.integers(0, 2), st.integers(0, 2))
def test_no_signalling_on_3x3(pa, pb, x, y):
    t = ClassicalTheory(ClassicalTheorySpec((("a", 3), ("b", 3)), {}, max_joint_size=9))
    a, b = t.universe.system(0), t.universe.system(1)
    u, v = t.op(a, pa), t.op(b, pb)
    rho = t.state(t.universe.full, [x, y])
    assert t.project(t.act(t.product(u, v), rho), a) == t.act(u, t.project(rho, a))
