"""Domains the checks quantify over: systems, operations, states and classes.

Every helper comes in two flavours, an exhaustive enumeration for finite
theories and a sampler driven by a per-check generator.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property

import numpy as np

from ..construction import AugmentedNoumenalState, LocalRealisticModel, NoumenalClass
from ..core import SamplingBudget, TheoryContract
from ..lattice import System, complement


class TheoryContext:
    def __init__(self, theory: TheoryContract, budget: SamplingBudget):
        self.theory = theory
        self.budget = budget
        self.universe = theory.universe
        self.systems = self.universe.systems()
        self._cache: dict = {}

    @property
    def exact(self) -> bool:
        return self.theory.enumerable

    # -- residuals ------------------------------------------------------------
    def op_res(self, u, v) -> float:
        return float(self.theory.op_distance(u, v))

    def state_res(self, rho, sigma) -> float:
        return float(self.theory.state_distance(rho, sigma))

    # -- enumeration ------------------------------------------------------------
    def ops(self, a: System):
        return self.theory.operations(a)

    def states(self, a: System):
        return self.theory.states(a)

    def I(self, a: System):
        return self.theory.identity(a)

    def chains(self, k: int) -> list[tuple[System, ...]]:
        """All ``A1 <= A2 <= ... <= Ak``."""
        key = ("chains", k)
        if key not in self._cache:
            out = [(s,) for s in self.systems]
            for _ in range(k - 1):
                out = [c + (s,) for c in out for s in self.systems if c[-1] <= s]
            self._cache[key] = out
        return self._cache[key]

    def families(self, k: int) -> list[tuple[System, ...]]:
        """All ordered ``k``-tuples of mutually disjoint systems (empty parts allowed)."""
        key = ("families", k)
        if key not in self._cache:
            n = self.universe.site_count
            out = []
            for labels in itertools.product(range(k + 1), repeat=n):
                masks = [sum(1 << s for s in range(n) if labels[s] == j) for j in range(k)]
                out.append(tuple(System(self.universe, m) for m in masks))
            self._cache[key] = out
        return self._cache[key]

    def op_tuples(self, systems) -> itertools.product:
        return itertools.product(*(self.ops(a) for a in systems))

    def op_count(self, systems, power: int = 1) -> int:
        return math.prod(len(self.ops(a)) ** power for a in systems)

    def family_ops(self, k: int, power: int = 1, with_state: bool = False):
        """(count, generator) over ``power`` operation tuples on each ``k``-family."""
        fams = self.families(k)
        count = sum(self.op_count(f, power) * (len(self.states(self.union(f))) if with_state else 1)
                    for f in fams)

        def gen():
            for f in fams:
                tuples = [list(self.op_tuples(f)) for _ in range(power)]
                states = self.states(self.union(f)) if with_state else [None]
                for combo in itertools.product(*tuples, states):
                    yield combo if with_state else combo[:-1]

        return count, gen

    def union(self, systems) -> System:
        m = 0
        for s in systems:
            m |= s.mask
        return System(self.universe, m)

    # -- sampling --------------------------------------------------------------
    def rand_system(self, rng: np.random.Generator) -> System:
        return System(self.universe, int(rng.integers(1 << self.universe.site_count)))

    def rand_family(self, rng: np.random.Generator, k: int) -> tuple[System, ...]:
        """Random mutually disjoint parts; as many of them nonempty as the site count allows."""
        n = self.universe.site_count
        need = min(k, n)
        while True:
            labels = rng.integers(k + 1, size=n)
            parts = tuple(System(self.universe, sum(1 << s for s in range(n) if labels[s] == j))
                          for j in range(k))
            if sum(not p.is_empty for p in parts) >= need:
                return parts

    def rand_chain(self, rng: np.random.Generator, k: int) -> tuple[System, ...]:
        top = self.rand_system(rng)
        out = [top]
        for _ in range(k - 1):
            out.append(System(self.universe, out[-1].mask & int(rng.integers(1 << self.universe.site_count))))
        return tuple(reversed(out))

    def rand_op(self, a: System, rng):
        return self.theory.sample_operation(a, rng)

    def rand_state(self, a: System, rng):
        return self.theory.sample_state(a, rng)

    def local_op(self, a: System, rng):
        """Product of independent single-site operations on ``a``."""
        t = self.theory
        if a.is_empty:
            return t.identity(a)
        parts = [t.sample_operation(System(self.universe, 1 << s), rng) for s in a.sites]
        return t.product_all(parts)

    def probes(self, a: System) -> list:
        """States used to tell operations apart: all states, or a fixed seeded sample."""
        if self.exact:
            return list(self.states(a))
        key = ("probes", a.mask)
        if key not in self._cache:
            rng = np.random.default_rng([self.budget.seed, a.mask, 7])
            self._cache[key] = [self.theory.sample_state(a, rng) for _ in range(4)]
        return self._cache[key]

    # -- witnesses -------------------------------------------------------------
    def serialize(self, kind: str, value):
        t = self.theory
        if kind == "system":
            return value.name()
        if kind == "systems":
            return [s.name() for s in value]
        if kind == "op":
            return t.serialize_op(value)
        if kind == "ops":
            return [t.serialize_op(u) for u in value]
        if kind == "state":
            return t.serialize_state(value)
        if kind == "class":
            return {"system": value.system.name(), "representative": t.serialize_op(value.representative)}
        if kind == "aug":
            return {"class": self.serialize("class", value.cls), "reference": t.serialize_state(value.reference)}
        return value

    def simpler(self, kind: str, value) -> list:
        t = self.theory
        if kind == "op":
            ident = t.identity(value.system)
            return [] if t.op_equal(ident, value) else [ident]
        if kind == "ops":
            out = []
            for i, u in enumerate(value):
                ident = t.identity(u.system)
                if not t.op_equal(ident, u):
                    out.append(tuple(value[:i]) + (ident,) + tuple(value[i + 1:]))
            return out
        if kind == "class":
            ident = t.identity(self.universe.full)
            if t.op_equal(ident, value.representative):
                return []
            return [NoumenalClass(value.system, ident, value.model)]
        return []


class ModelContext(TheoryContext):
    def __init__(self, model: LocalRealisticModel, budget: SamplingBudget):
        super().__init__(model.theory, budget)
        self.model = model
        self.S = self.universe.full

    @cached_property
    def G(self) -> list:
        return list(self.ops(self.S))

    def cls(self, w, a: System) -> NoumenalClass:
        return NoumenalClass(a, w, self.model)

    def class_res(self, n1: NoumenalClass, n2: NoumenalClass) -> float:
        return float(self.model.class_distance(n1, n2))

    def stab(self, a: System, rng, local: bool = False):
        """Random element ``I^a x V`` of the stabilizer of ``[.]^a``."""
        rest = complement(a)
        v = self.local_op(rest, rng) if local else self.rand_op(rest, rng)
        return self.theory.product(self.I(a), v)

    def other_rep(self, w, a: System, rng=None):
        """A second representative of ``[w]^a``: canonical for finite theories, randomised otherwise."""
        t = self.theory
        if self.exact:
            return self.model.canonical_representative(self.cls(w, a))
        return t.compose(self.stab(a, rng, local=True), w)

    def coset(self, w, a: System) -> list:
        return [self.theory.compose(h, w) for h in self.model.stabilizer(a)]

    def aug(self, n: NoumenalClass, rho) -> AugmentedNoumenalState:
        return AugmentedNoumenalState(n, rho)

    def global_states(self):
        return self.states(self.S)
