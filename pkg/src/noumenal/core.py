"""The contract every concrete operational theory implements.

A theory supplies, for every system of its lattice, a phenomenal state
space, a group of operations acting on it, a projector onto subsystems and
a product of operations on disjoint systems.  It also has to decide whether
a global operation factors as ``I^A x V`` for some ``V`` on the complement
of ``A``; the noumenal construction is built on top of that oracle.

Composition follows the usual convention: ``compose(u, v)`` is ``uv``, the
operation that applies ``v`` first.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass
from functools import reduce
from typing import Any, Hashable, Iterable, Sequence

import numpy as np

from .errors import BudgetError, NotDisjointError, SystemMismatchError
from .lattice import SiteUniverse, System, complement, mutually_disjoint

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SamplingBudget:
    """How hard the verifier and the quotient construction may work.

    ``mode="exhaustive"`` enumerates every quantified domain that is
    enumerable and small enough (at most ``max_cases`` cases) and samples
    the rest; ``mode="sampled"`` always samples.
    """

    mode: str = "exhaustive"
    sample_count: int = 1000
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    max_cases: int = 10**7

    def __post_init__(self):
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown budget mode {self.mode!r}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")


class TheoryContract(abc.ABC):
    """A reversible no-signalling operational theory.

    Subclasses implement the abstract methods; everything else is derived.
    Enumerable theories override :meth:`operations` and :meth:`states`.
    """

    universe: SiteUniverse
    tolerance: float = DEFAULT_TOLERANCE
    name: str = "theory"

    # -- required structure -------------------------------------------------
    @abc.abstractmethod
    def identity(self, a: System) -> Any: ...

    @abc.abstractmethod
    def compose(self, u, v): ...

    @abc.abstractmethod
    def inverse(self, u): ...

    @abc.abstractmethod
    def act(self, u, rho): ...

    @abc.abstractmethod
    def project(self, rho, a: System): ...

    @abc.abstractmethod
    def product(self, u, v): ...

    @abc.abstractmethod
    def factor_through_complement(self, w, a: System):
        """Return ``V`` on the complement of ``a`` with ``w == I^a x V``, or None."""

    @abc.abstractmethod
    def op_distance(self, u, v) -> float: ...

    @abc.abstractmethod
    def state_distance(self, rho, sigma) -> float: ...

    @abc.abstractmethod
    def sample_operation(self, a: System, rng: np.random.Generator): ...

    @abc.abstractmethod
    def sample_state(self, a: System, rng: np.random.Generator): ...

    @abc.abstractmethod
    def serialize_op(self, u) -> Any: ...

    @abc.abstractmethod
    def serialize_state(self, rho) -> Any: ...

    # -- enumeration ----------------------------------------------------------
    @property
    def enumerable(self) -> bool:
        return False

    def operations(self, a: System) -> Sequence:
        raise BudgetError(f"{self.name}: operations on {a.name()} are not enumerable")

    def states(self, a: System) -> Sequence:
        raise BudgetError(f"{self.name}: states of {a.name()} are not enumerable")

    def op_key(self, u) -> Hashable:
        """Hashable key identifying an operation exactly (enumerable theories only)."""
        raise BudgetError(f"{self.name}: operations have no exact key")

    def state_key(self, rho) -> Hashable:
        raise BudgetError(f"{self.name}: states have no exact key")

    # -- derived structure ----------------------------------------------------
    def op_equal(self, u, v) -> bool:
        return u.system == v.system and self.op_distance(u, v) <= self.tolerance

    def states_equal(self, rho, sigma) -> bool:
        return rho.system == sigma.system and self.state_distance(rho, sigma) <= self.tolerance

    def is_operation(self, u) -> bool:
        """Membership in the operation group of ``u.system``."""
        if self.enumerable:
            return self.op_key(u) in {self.op_key(v) for v in self.operations(u.system)}
        return True

    def lift_state(self, sigma, b: System):
        """Some state of ``b`` whose projection onto ``sigma.system`` is ``sigma``."""
        raise BudgetError(f"{self.name}: no constructive preimage for projections")

    def factor_residual(self, w, a: System) -> float:
        """0 when ``w`` factors through the complement of ``a``, positive otherwise."""
        return 0.0 if self.factor_through_complement(w, a) is not None else float("inf")

    def alternate_representative(self, u, rng: np.random.Generator):
        """Another concrete representative of the same operation (default: ``u`` itself)."""
        return u

    def embed(self, u):
        """``u x I`` on the global system."""
        rest = complement(u.system)
        if rest.is_empty:
            return u
        return self.product(u, self.identity(rest))

    def product_all(self, ops: Iterable):
        ops = list(ops)
        if not ops:
            return self.identity(self.universe.empty)
        return reduce(self.product, ops)

    def check_same_system(self, u, v) -> None:
        if u.system != v.system:
            raise SystemMismatchError(f"{u.system!r} vs {v.system!r}")

    def check_disjoint(self, a: System, b: System) -> None:
        if not mutually_disjoint([a, b]):
            raise NotDisjointError(f"{a!r} and {b!r} overlap")

    def global_system(self) -> System:
        return self.universe.full


def compose(theory: TheoryContract, u, v):
    return theory.compose(u, v)


def inverse(theory: TheoryContract, u):
    return theory.inverse(u)


def act(theory: TheoryContract, u, rho):
    return theory.act(u, rho)


def project_phenomenal(theory: TheoryContract, rho, a: System):
    return theory.project(rho, a)


def product_of_operations(theory: TheoryContract, u, v):
    return theory.product(u, v)


def factor_through_complement(theory: TheoryContract, w, a: System):
    return theory.factor_through_complement(w, a)


class FaithfulQuotient(TheoryContract):
    """Quotient of a theory by the kernel of its phenomenal action.

    Two operations are identified when they act identically on every probe
    state.  For enumerable theories the probes are all states, so the
    quotient is exact; otherwise a seeded random sample of states is used,
    which makes the identification a numerical test.
    """

    def __init__(self, base: TheoryContract, budget: SamplingBudget):
        self.base = base
        self.universe = base.universe
        self.tolerance = base.tolerance
        self.name = f"faithful({base.name})"
        self.budget = budget
        self._probes: dict[int, list] = {}
        if budget.mode == "exhaustive" and not base.enumerable:
            raise BudgetError(f"{base.name} has no enumerable state space; use a sampled budget")

    def probes(self, a: System) -> list:
        if a.mask not in self._probes:
            if self.base.enumerable:
                self._probes[a.mask] = list(self.base.states(a))
            else:
                rng = np.random.default_rng([self.budget.seed, a.mask])
                self._probes[a.mask] = [self.base.sample_state(a, rng) for _ in range(self.budget.sample_count)]
        return self._probes[a.mask]

    def signature(self, u) -> tuple:
        return tuple(self.base.state_key(self.base.act(u, p)) for p in self.probes(u.system))

    @property
    def enumerable(self) -> bool:
        return self.base.enumerable

    def operations(self, a: System) -> list:
        seen, out = set(), []
        for u in self.base.operations(a):
            sig = self.signature(u)
            if sig not in seen:
                seen.add(sig)
                out.append(u)
        return out

    def states(self, a):
        return self.base.states(a)

    def op_key(self, u):
        return self.signature(u)

    def state_key(self, rho):
        return self.base.state_key(rho)

    def op_distance(self, u, v) -> float:
        if u.system != v.system:
            return float("inf")
        if self.base.enumerable:
            return 0.0 if self.signature(u) == self.signature(v) else float("inf")
        return max(self.base.state_distance(self.base.act(u, p), self.base.act(v, p)) for p in self.probes(u.system))

    def identity(self, a):
        return self.base.identity(a)

    def compose(self, u, v):
        return self.base.compose(u, v)

    def inverse(self, u):
        return self.base.inverse(u)

    def act(self, u, rho):
        return self.base.act(u, rho)

    def project(self, rho, a):
        return self.base.project(rho, a)

    def product(self, u, v):
        return self.base.product(u, v)

    def factor_through_complement(self, w, a):
        return self.base.factor_through_complement(w, a)

    def state_distance(self, rho, sigma):
        return self.base.state_distance(rho, sigma)

    def sample_operation(self, a, rng):
        return self.base.sample_operation(a, rng)

    def sample_state(self, a, rng):
        return self.base.sample_state(a, rng)

    def alternate_representative(self, u, rng):
        return self.base.alternate_representative(u, rng)

    def serialize_op(self, u):
        return self.base.serialize_op(u)

    def serialize_state(self, rho):
        return self.base.serialize_state(rho)


def faithfulize(theory: TheoryContract, budget: SamplingBudget | None = None) -> TheoryContract:
    """Identify operations that act identically on all phenomenal states."""
    return FaithfulQuotient(theory, budget or SamplingBudget())
