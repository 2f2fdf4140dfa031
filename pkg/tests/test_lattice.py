import pytest
from hypothesis import given
from hypothesis import strategies as st

from noumenal.errors import UniverseMismatchError
from noumenal.lattice import (
    SiteUniverse,
    System,
    complement,
    generalized_union,
    intersection,
    is_disjoint,
    is_subsystem,
    mutually_disjoint,
    union,
)

U4 = SiteUniverse.of_size(4)
systems = st.integers(0, U4.full_mask).map(lambda m: System(U4, m))


def test_universe_rejects_bad_labels():
    with pytest.raises(ValueError):
        SiteUniverse([])
    with pytest.raises(ValueError):
        SiteUniverse(["a", "a"])
    with pytest.raises(ValueError):
        SiteUniverse.of_size(17)


def test_system_by_label_and_index():
    u = SiteUniverse(["alice", "bob", "carol"])
    assert u.system("bob", 2) == u.system(1, "carol")
    assert u.system("alice").labels == ("alice",)
    with pytest.raises(KeyError):
        u.system("dave")
    with pytest.raises(KeyError):
        u.system(3)


def test_names():
    assert U4.empty.name() == "∅"
    assert U4.full.name() == "S"
    assert U4.system(0, 2).name() == "s0,s2"


def test_enumeration_orders():
    assert [s.mask for s in U4.systems()] == list(range(16))
    assert [s.mask for s in U4.system(0, 2).subsystems()] == [0, 1, 4, 5]
    assert len(U4.singletons()) == 4


def test_mixing_universes_is_an_error():
    other = SiteUniverse.of_size(4, prefix="t")
    with pytest.raises(UniverseMismatchError):
        union(U4.full, other.full)


def test_empty_generalized_union_needs_universe():
    assert generalized_union([], U4) == U4.empty
    with pytest.raises(ValueError):
        generalized_union([])


def test_mutually_disjoint():
    a, b, c = U4.system(0), U4.system(1, 2), U4.system(2, 3)
    assert mutually_disjoint([a, b])
    assert not mutually_disjoint([a, b, c])
    assert mutually_disjoint([])


@given(systems, systems, systems)
def test_distributive_lattice(a, b, c):
    assert union(a, intersection(b, c)) == intersection(union(a, b), union(a, c))
    assert intersection(a, union(b, c)) == union(intersection(a, b), intersection(a, c))
    assert union(a, intersection(a, b)) == a


@given(systems, systems)
def test_complement_laws(a, b):
    assert union(a, complement(a)) == U4.full
    assert is_disjoint(a, complement(a))
    assert complement(complement(a)) == a
    assert complement(union(a, b)) == intersection(complement(a), complement(b))


@given(systems, systems)
def test_order_matches_meet(a, b):
    assert is_subsystem(a, b) == (intersection(a, b) == a) == (union(a, b) == b)
    assert (a <= b) == is_subsystem(a, b)
    assert U4.empty <= a <= U4.full


@given(st.lists(systems, max_size=5))
def test_generalized_union_is_least_upper_bound(parts):
    top = generalized_union(parts, U4)
    assert all(p <= top for p in parts)
    expected = 0
    for p in parts:
        expected |= p.mask
    assert top.mask == expected
