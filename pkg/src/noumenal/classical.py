"""Finite reversible classical theories.

Each site carries a finite value set ``{0, ..., k-1}``.  A phenomenal state
of a system is the tuple of its sites' values, an operation is a
permutation of the system's joint value space, projection keeps the
coordinates of the subsystem, and the product of two operations acts
blockwise.  Everything is exact, so these theories are the brute-force
ground truth for the axiom checks.

Joint value spaces are ordered lexicographically with the lowest site
index most significant.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import SamplingBudget, TheoryContract
from .errors import BudgetError, NotASubsystemError, TheoryLoadError
from .lattice import SiteUniverse, System, complement, is_subsystem

MAX_JOINT_SIZE = 8
MAX_GROUP_ORDER = 40320


@dataclass(frozen=True)
class ValueTuple:
    system: System
    values: tuple[int, ...]

    def __repr__(self) -> str:
        return f"ValueTuple({self.system.name()}: {self.values})"


@dataclass(frozen=True)
class BlockPermutation:
    system: System
    table: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.table) != list(range(len(self.table))):
            raise TheoryLoadError(f"table {self.table} is not a bijection (monoid-only operations are not supported)")

    def image_line(self) -> str:
        return " ".join(map(str, self.table))

    def __repr__(self) -> str:
        return f"BlockPermutation({self.system.name()}: {self.image_line()})"


@dataclass(frozen=True)
class GroupDecl:
    """How the operation group of one system is declared.

    ``mode`` is ``"full"`` (every permutation of the joint space) or
    ``"generated"`` (closure of ``generators`` together with everything
    lifted from proper subsystems).
    """

    mode: str
    generators: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class ClassicalTheorySpec:
    sites: tuple[tuple[str, int], ...]
    groups: dict = field(default_factory=dict)  # bitmask -> GroupDecl
    max_joint_size: int = MAX_JOINT_SIZE
    max_group_order: int = MAX_GROUP_ORDER

    def __hash__(self):
        return hash((self.sites, tuple(sorted(self.groups.items())), self.max_joint_size, self.max_group_order))


class ClassicalTheory(TheoryContract):
    """A finite classical theory built from a :class:`ClassicalTheorySpec`.

    Undeclared singleton sites get the full symmetric group; undeclared
    composite systems get the group generated by their subsystems, which
    makes every product ``u x v`` an operation of the joint system.
    """

    def __init__(self, spec: ClassicalTheorySpec, name: str = "classical"):
        for label, k in spec.sites:
            if k < 2:
                raise TheoryLoadError(f"site {label} needs at least 2 values, got {k}")
        self.spec = spec
        self.name = name
        self.universe = SiteUniverse([label for label, _ in spec.sites])
        self.radix = tuple(k for _, k in spec.sites)
        self.tolerance = 0.0
        if self.joint_size(self.universe.full) > spec.max_joint_size:
            raise BudgetError(
                f"global joint space has {self.joint_size(self.universe.full)} elements, "
                f"cap is {spec.max_joint_size}"
            )
        self._groups: dict[int, list[BlockPermutation]] = {}

    @classmethod
    def uniform(cls, n_sites: int, values: int = 2, full_global: bool = False, **kw) -> "ClassicalTheory":
        sites = tuple((f"s{i}", values) for i in range(n_sites))
        groups = {(1 << n_sites) - 1: GroupDecl("full")} if full_global else {}
        return cls(ClassicalTheorySpec(sites, groups), **kw)

    # -- value spaces ---------------------------------------------------------
    def joint_size(self, a: System) -> int:
        return math.prod(self.radix[i] for i in a.sites)

    @lru_cache(maxsize=None)
    def _tuples(self, mask: int) -> tuple[tuple[int, ...], ...]:
        sites = System(self.universe, mask).sites
        return tuple(itertools.product(*(range(self.radix[i]) for i in sites)))

    @lru_cache(maxsize=None)
    def _index(self, mask: int) -> dict:
        return {t: i for i, t in enumerate(self._tuples(mask))}

    @lru_cache(maxsize=None)
    def _restriction(self, mask: int, sub: int) -> tuple[int, ...]:
        """For each joint index of ``mask``, the joint index of its restriction to ``sub``."""
        sites = System(self.universe, mask).sites
        keep = [k for k, s in enumerate(sites) if sub >> s & 1]
        index = self._index(sub)
        return tuple(index[tuple(t[k] for k in keep)] for t in self._tuples(mask))

    @lru_cache(maxsize=None)
    def _merge(self, a: int, b: int) -> dict:
        """Map (index on a, index on b) to the joint index on a|b."""
        ab = a | b
        ra, rb = self._restriction(ab, a), self._restriction(ab, b)
        return {(ra[i], rb[i]): i for i in range(len(ra))}

    def state(self, a: System, values: Sequence[int]) -> ValueTuple:
        values = tuple(int(v) for v in values)
        if len(values) != a.size:
            raise ValueError(f"{a!r} needs {a.size} values, got {len(values)}")
        for v, s in zip(values, a.sites):
            if not 0 <= v < self.radix[s]:
                raise ValueError(f"value {v} out of range for site {self.universe.labels[s]}")
        return ValueTuple(a, values)

    def op(self, a: System, table: Sequence[int]) -> BlockPermutation:
        table = tuple(int(x) for x in table)
        if len(table) != self.joint_size(a):
            raise TheoryLoadError(f"{a!r} needs a table of length {self.joint_size(a)}, got {len(table)}")
        return BlockPermutation(a, table)

    # -- contract ---------------------------------------------------------------
    @property
    def enumerable(self) -> bool:
        return True

    def identity(self, a):
        return BlockPermutation(a, tuple(range(self.joint_size(a))))

    def compose(self, u, v):
        self.check_same_system(u, v)
        return BlockPermutation(u.system, tuple(u.table[j] for j in v.table))

    def inverse(self, u):
        inv = [0] * len(u.table)
        for i, j in enumerate(u.table):
            inv[j] = i
        return BlockPermutation(u.system, tuple(inv))

    def act(self, u, rho):
        self.check_same_system(u, rho)
        m = u.system.mask
        return ValueTuple(u.system, self._tuples(m)[u.table[self._index(m)[rho.values]]])

    def project(self, rho, a):
        if not is_subsystem(a, rho.system):
            raise NotASubsystemError(f"{a!r} is not a subsystem of {rho.system!r}")
        keep = [k for k, s in enumerate(rho.system.sites) if a.mask >> s & 1]
        return ValueTuple(a, tuple(rho.values[k] for k in keep))

    restrict = project

    def product(self, u, v):
        self.check_disjoint(u.system, v.system)
        a, b = u.system.mask, v.system.mask
        ab = a | b
        ra, rb = self._restriction(ab, a), self._restriction(ab, b)
        merge = self._merge(a, b)
        table = tuple(merge[(u.table[ra[i]], v.table[rb[i]])] for i in range(len(ra)))
        return BlockPermutation(System(self.universe, ab), table)

    block_product = product

    def factor_through_complement(self, w, a):
        rest = complement(a) & w.system
        ma, mr = a.mask & w.system.mask, rest.mask
        ra, rr = self._restriction(w.system.mask, ma), self._restriction(w.system.mask, mr)
        table = [None] * self.joint_size(rest)
        for i, j in enumerate(w.table):
            if ra[j] != ra[i]:
                return None
            if table[rr[i]] is None:
                table[rr[i]] = rr[j]
            elif table[rr[i]] != rr[j]:
                return None
        return BlockPermutation(rest, tuple(table))

    factor_classical = factor_through_complement

    def lift_state(self, sigma, b):
        if not is_subsystem(sigma.system, b):
            raise NotASubsystemError(f"{sigma.system!r} is not a subsystem of {b!r}")
        vals = dict(zip(sigma.system.sites, sigma.values))
        return ValueTuple(b, tuple(vals.get(s, 0) for s in b.sites))

    def op_distance(self, u, v):
        if u.system != v.system:
            return float("inf")
        return float(sum(x != y for x, y in zip(u.table, v.table)))

    def state_distance(self, rho, sigma):
        if rho.system != sigma.system:
            return float("inf")
        return float(sum(x != y for x, y in zip(rho.values, sigma.values)))

    def op_key(self, u):
        return (u.system.mask, u.table)

    def state_key(self, rho):
        return (rho.system.mask, rho.values)

    def states(self, a):
        return [ValueTuple(a, t) for t in self._tuples(a.mask)]

    def operations(self, a):
        if a.mask not in self._groups:
            self._groups[a.mask] = self.enumerate_group(a)
        return self._groups[a.mask]

    def sample_operation(self, a, rng):
        ops = self.operations(a)
        return ops[int(rng.integers(len(ops)))]

    def sample_state(self, a, rng):
        return ValueTuple(a, tuple(int(rng.integers(self.radix[s])) for s in a.sites))

    def serialize_op(self, u):
        return {"system": u.system.name(), "image": u.image_line()}

    def serialize_state(self, rho):
        return {"system": rho.system.name(), "values": list(rho.values)}

    # -- groups -----------------------------------------------------------------
    def declaration(self, a: System) -> GroupDecl:
        if a.mask in self.spec.groups:
            return self.spec.groups[a.mask]
        if a.size == 1:
            return GroupDecl("full")
        return GroupDecl("generated")

    def order_bound(self, a: System) -> int:
        return math.factorial(self.joint_size(a))

    @lru_cache(maxsize=None)
    def generators(self, mask: int) -> tuple[BlockPermutation, ...]:
        a = System(self.universe, mask)
        n = self.joint_size(a)
        decl = self.declaration(a)
        if decl.mode == "full":
            gens = []
            for i in range(n - 1):
                t = list(range(n))
                t[i], t[i + 1] = t[i + 1], t[i]
                gens.append(BlockPermutation(a, tuple(t)))
            return tuple(gens)
        gens = {self.op(a, g) for g in decl.generators}
        for sub in a.subsystems():
            if sub.is_empty or sub == a:
                continue
            rest = System(self.universe, mask & ~sub.mask)
            for g in self.generators(sub.mask):
                gens.add(self.product(g, self.identity(rest)))
        return tuple(sorted(gens, key=lambda g: g.table))

    def enumerate_group(self, a: System) -> list[BlockPermutation]:
        """All operations on ``a``, sorted by table."""
        n = self.joint_size(a)
        if self.declaration(a).mode == "full":
            if math.factorial(n) > self.spec.max_group_order:
                raise BudgetError(f"group on {a.name()} has order {math.factorial(n)} > {self.spec.max_group_order}")
            return [BlockPermutation(a, p) for p in itertools.permutations(range(n))]
        ident = self.identity(a)
        seen = {ident.table}
        frontier = [ident]
        gens = self.generators(a.mask)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.compose(g, x)
                    if y.table not in seen:
                        seen.add(y.table)
                        nxt.append(y)
                        if len(seen) > self.spec.max_group_order:
                            raise BudgetError(
                                f"closure on {a.name()} exceeds {self.spec.max_group_order} elements "
                                f"(order bound {self.order_bound(a)})"
                            )
            frontier = nxt
        return [BlockPermutation(a, t) for t in sorted(seen)]


def enumerate_group(sys: System, spec: ClassicalTheorySpec) -> list[BlockPermutation]:
    return ClassicalTheory(spec).enumerate_group(System(SiteUniverse([l for l, _ in spec.sites]), sys.mask))


def classical_cnot(theory: ClassicalTheory, control: int = 0, target: int = 1) -> BlockPermutation:
    """``(x, y) -> (x, x xor y)`` on two 2-valued sites, as a permutation of their joint space."""
    a = theory.universe.system(control, target)
    table = []
    for t in theory._tuples(a.mask):
        vals = dict(zip(a.sites, t))
        vals[target] ^= vals[control]
        table.append(theory._index(a.mask)[tuple(vals[s] for s in a.sites)])
    return BlockPermutation(a, tuple(table))
