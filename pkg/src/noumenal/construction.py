"""Local-realistic model built from a reversible no-signalling theory.

The noumenal state of a system ``A`` is a class ``[W]^A`` of global
operations, where ``W ~_A W'`` means ``W = (I^A x V) W'`` for some ``V`` on
the complement of ``A``.  Intuitively ``[W]^A`` is "whatever ``W`` did to
``A``", with everything that only touched the rest of the universe
quotiented away.  On top of the classes sit the projectors, the action
``U([W]^A) = [(U x I) W]^A``, the join ``[W]^A . [W]^B = [W]^AB`` and one
homomorphism ``phi_rho([W]^A) = pi_A(W(rho))`` per global state ``rho``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import reduce
from typing import Any, Sequence

from .core import SamplingBudget, TheoryContract
from .errors import (
    BudgetError,
    ConstructionRefused,
    IncompatibleClassesError,
    NotASubsystemError,
    NotDisjointError,
    SystemMismatchError,
)
from .lattice import System, complement, is_subsystem, mutually_disjoint


@dataclass(frozen=True, eq=False)
class NoumenalClass:
    system: System
    representative: Any
    model: "LocalRealisticModel"

    def __eq__(self, other):
        if not isinstance(other, NoumenalClass):
            return NotImplemented
        return self.system == other.system and self.model.equivalent(
            self.representative, other.representative, self.system
        )

    def __hash__(self):
        return hash((self.system.mask, self.model.canonical_key(self)))

    def __repr__(self):
        return f"[{self.representative!r}]^{self.system.name()}"


@dataclass(frozen=True, eq=False)
class AugmentedNoumenalState:
    """A noumenal class paired with the global state indexing its homomorphism."""

    cls: NoumenalClass
    reference: Any

    @property
    def system(self) -> System:
        return self.cls.system


class LocalRealisticModel:
    def __init__(self, theory: TheoryContract, *, report=None, forced: bool = False):
        self.theory = theory
        self.universe = theory.universe
        self.report = report
        self.forced = forced
        self._stabilizers: dict[int, list] = {}
        self._canon: dict = {}

    # -- equivalence -------------------------------------------------------------
    def pad(self, u):
        """``u x I`` on the global system."""
        return self.theory.embed(u)

    def witness(self, w1, w2, a: System):
        """``V`` on the complement of ``a`` with ``w1 = (I^a x V) w2``, or None."""
        t = self.theory
        return t.factor_through_complement(t.compose(w1, t.inverse(w2)), a)

    def equivalent(self, w1, w2, a: System) -> bool:
        if self.theory.enumerable:
            key = (a.mask, self.theory.op_key(w1), self.theory.op_key(w2))
            hit = self._canon.get(key)
            if hit is None:
                hit = self._canon[key] = self.witness(w1, w2, a) is not None
            return hit
        return self.witness(w1, w2, a) is not None

    def class_distance(self, n1: NoumenalClass, n2: NoumenalClass) -> float:
        """Residual of the equivalence test: 0 for equal classes, ``inf`` on a system mismatch."""
        if n1.system != n2.system:
            return float("inf")
        t = self.theory
        return t.factor_residual(t.compose(n1.representative, t.inverse(n2.representative)), n1.system)

    def noumenal(self, w, a: System) -> NoumenalClass:
        if not w.system.is_global:
            raise SystemMismatchError("noumenal classes are labelled by global operations")
        return NoumenalClass(a, w, self)

    def initial(self, a: System) -> NoumenalClass:
        return self.noumenal(self.theory.identity(self.universe.full), a)

    # -- finite coset machinery --------------------------------------------------
    def stabilizer(self, a: System) -> list:
        """``H_A = {I^A x V}``: the global operations that leave ``[.]^A`` unchanged."""
        if a.mask not in self._stabilizers:
            t = self.theory
            rest = complement(a)
            self._stabilizers[a.mask] = [t.product(t.identity(a), v) for v in t.operations(rest)]
        return self._stabilizers[a.mask]

    def canonical_representative(self, n: NoumenalClass):
        """Lexicographically smallest member of the coset ``H_A W``."""
        t = self.theory
        if not t.enumerable:
            raise BudgetError("canonical representatives need an enumerable theory")
        return min((t.compose(h, n.representative) for h in self.stabilizer(n.system)), key=t.op_key)

    def canonical_key(self, n: NoumenalClass):
        if not self.theory.enumerable:
            raise TypeError("noumenal classes of a continuous theory are not hashable")
        key = ("canon", n.system.mask, self.theory.op_key(n.representative))
        if key not in self._canon:
            self._canon[key] = self.theory.op_key(self.canonical_representative(n))
        return self._canon[key]

    def noumenal_space(self, a: System) -> list[NoumenalClass]:
        """Every class ``[W]^A``, one per coset, ordered by canonical representative."""
        t = self.theory
        seen = {}
        for w in t.operations(self.universe.full):
            n = NoumenalClass(a, w, self)
            k = self.canonical_key(n)
            if k not in seen:
                seen[k] = NoumenalClass(a, self.canonical_representative(n), self)
        return [seen[k] for k in sorted(seen)]

    def class_sizes(self, a: System) -> list[tuple[NoumenalClass, int]]:
        counts: dict = {}
        for w in self.theory.operations(self.universe.full):
            k = self.canonical_key(NoumenalClass(a, w, self))
            counts[k] = counts.get(k, 0) + 1
        return [(n, counts[self.canonical_key(n)]) for n in self.noumenal_space(a)]

    def class_index(self, n: NoumenalClass) -> int:
        keys = [self.canonical_key(c) for c in self.noumenal_space(n.system)]
        return keys.index(self.canonical_key(n))

    # -- structure -----------------------------------------------------------------
    def project(self, n: NoumenalClass, a: System) -> NoumenalClass:
        if not is_subsystem(a, n.system):
            raise NotASubsystemError(f"{a!r} is not a subsystem of {n.system!r}")
        return NoumenalClass(a, n.representative, self)

    def act(self, u, n: NoumenalClass) -> NoumenalClass:
        if u.system != n.system:
            raise SystemMismatchError(f"operation on {u.system!r} cannot act on a class of {n.system!r}")
        return NoumenalClass(n.system, self.theory.compose(self.pad(u), n.representative), self)

    def common_representative(self, n1: NoumenalClass, n2: NoumenalClass):
        """A global ``W`` with ``W ~_A W1`` and ``W ~_B W2``, or None.

        Exact search over ``H_B`` for enumerable theories.  Otherwise the
        residual ``W1 W2^-1`` is aligned on ``A`` by its leading operator
        Schmidt factor and the remainder must factor through the complement
        of ``A``.  That procedure never accepts an incompatible pair; it is
        complete whenever the residual is a product across ``A`` and its
        complement, which covers every pair when ``A`` and ``B`` exhaust the
        universe.
        """
        t = self.theory
        a, b = n1.system, n2.system
        w1, w2 = n1.representative, n2.representative
        if t.op_equal(w1, w2) or b.is_empty:
            return w1
        if a.is_empty:
            return w2
        if t.enumerable:
            for h in self.stabilizer(b):
                w = t.compose(h, w2)
                if self.equivalent(w, w1, a):
                    return w
            return None
        align = getattr(t, "local_alignment", None)
        if align is None:
            return None
        m = t.compose(w1, t.inverse(w2))
        q = align(m, a)
        if q is None:
            return None
        h_b = self.pad(q)
        if t.factor_through_complement(t.compose(m, t.inverse(h_b)), a) is None:
            return None
        return t.compose(h_b, w2)

    def join(self, n1: NoumenalClass, n2: NoumenalClass) -> NoumenalClass:
        a, b = n1.system, n2.system
        if not mutually_disjoint([a, b]):
            raise NotDisjointError(f"{a!r} and {b!r} overlap")
        w = self.common_representative(n1, n2)
        if w is None:
            raise IncompatibleClassesError(
                f"no global operation lies in both {a.name()}-class and {b.name()}-class: "
                f"W1 W2^-1 does not factor as (I^{a.name()} x V)(I^{b.name()} x V')"
            )
        return NoumenalClass(a | b, w, self)

    def join_all(self, classes: Sequence[NoumenalClass]) -> NoumenalClass:
        """Generalized join over mutually disjoint systems, as a left fold."""
        classes = list(classes)
        if not mutually_disjoint([c.system for c in classes]):
            raise NotDisjointError("generalized join needs mutually disjoint systems")
        if not classes:
            return self.initial(self.universe.empty)
        return reduce(self.join, classes)

    def phi(self, rho, n: NoumenalClass):
        """``phi_rho([W]^A) = pi_A(W(rho))`` for a global phenomenal state ``rho``."""
        if not rho.system.is_global:
            raise SystemMismatchError("phi is indexed by global phenomenal states")
        return self.theory.project(self.theory.act(n.representative, rho), n.system)

    # -- augmented states ----------------------------------------------------------
    def augmented(self, n: NoumenalClass, rho) -> AugmentedNoumenalState:
        return AugmentedNoumenalState(n, rho)

    def project_augmented(self, s: AugmentedNoumenalState, a: System) -> AugmentedNoumenalState:
        return AugmentedNoumenalState(self.project(s.cls, a), s.reference)

    def act_augmented(self, u, s: AugmentedNoumenalState) -> AugmentedNoumenalState:
        return AugmentedNoumenalState(self.act(u, s.cls), s.reference)

    def join_augmented(self, s1: AugmentedNoumenalState, s2: AugmentedNoumenalState) -> AugmentedNoumenalState:
        if not self.theory.states_equal(s1.reference, s2.reference):
            raise IncompatibleClassesError("augmented states carry different reference states")
        return AugmentedNoumenalState(self.join(s1.cls, s2.cls), s1.reference)

    def phi_prime(self, s: AugmentedNoumenalState):
        return self.phi(s.reference, s.cls)

    def augmented_equal(self, s1: AugmentedNoumenalState, s2: AugmentedNoumenalState) -> bool:
        return s1.cls == s2.cls and self.theory.states_equal(s1.reference, s2.reference)

    # -- export ----------------------------------------------------------------------
    def coset_table(self) -> dict:
        t = self.theory
        g = len(t.operations(self.universe.full))
        systems = []
        for a in self.universe.systems():
            sizes = self.class_sizes(a)
            systems.append({
                "system": a.name(),
                "sites": list(a.labels),
                "group_order": g,
                "stabilizer_order": len(self.stabilizer(a)),
                "class_count": len(sizes),
                "classes": [
                    {"representative": t.serialize_op(n.representative)["image"], "members": k}
                    for n, k in sizes
                ],
            })
        return {"theory": t.name, "forced": self.forced, "systems": systems}


# module-level spellings of the model operations
def equivalent(model: LocalRealisticModel, w1, w2, a: System) -> bool:
    return model.equivalent(w1, w2, a)


def noumenal_project(n: NoumenalClass, a: System) -> NoumenalClass:
    return n.model.project(n, a)


def noumenal_act(u, n: NoumenalClass) -> NoumenalClass:
    return n.model.act(u, n)


def join(n1: NoumenalClass, n2: NoumenalClass) -> NoumenalClass:
    return n1.model.join(n1, n2)


def phi_rho(rho, n: NoumenalClass):
    return n.model.phi(rho, n)


def build_local_model(theory: TheoryContract, budget: SamplingBudget | None = None, *,
                      force: bool = False, model_cls=LocalRealisticModel) -> LocalRealisticModel:
    """Verify ``theory`` and build its local-realistic model.

    Raises :class:`ConstructionRefused` when an axiom check fails, unless
    ``force`` is set, in which case the model is marked as forced.
    """
    from .verify import verify_theory

    report = verify_theory(theory, budget or SamplingBudget())
    if not report.passed and not force:
        raise ConstructionRefused(report)
    return model_cls(theory, report=report, forced=not report.passed)


def relabel(u, system: System):
    """The same payload declared on another system of equal size (used by sabotage variants)."""
    return dataclasses.replace(u, system=system)
