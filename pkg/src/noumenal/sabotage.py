"""Deliberately broken theories and models.

Each sabotage is a small override of one method of a sound theory or of
the model, paired with the checks that must catch it.  They keep the
catalogue honest: a check that no sabotage can make fail is a check that
might be passing vacuously.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classical import BlockPermutation, ClassicalTheory, ClassicalTheorySpec, GroupDecl, ValueTuple
from .construction import AugmentedNoumenalState, LocalRealisticModel, NoumenalClass
from .core import TheoryContract
from .lattice import complement
from .quantum import DensityMatrix, QuantumTheory, UnitaryClass, partial_trace_matrix, place


def _rebase(theory: TheoryContract, mixin: type, tag: str) -> TheoryContract:
    """A shallow copy of ``theory`` whose class has ``mixin`` in front."""
    cls = type(f"{mixin.__name__.lstrip('_')}{type(theory).__name__}", (mixin, type(theory)), {})
    out = cls.__new__(cls)
    out.__dict__.update(theory.__dict__)
    out.name = f"{theory.name}+{tag}"
    return out


def _is_quantum(t) -> bool:
    return isinstance(t, QuantumTheory)


# -- theory-level mutations ------------------------------------------------------

class _SwappedProduct:
    # the second factor enters inverted, so its compositions come out in reverse order
    def product(self, u, v):
        return super().product(u, self.inverse(v))


class _ReversedComposition:
    def compose(self, u, v):
        return super().compose(v, u)


class _BadIdentity:
    def identity(self, a):
        real = super().identity(a)
        if a.is_empty:
            return real
        if _is_quantum(self):
            x = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2 ** (a.size - 1)))
            return UnitaryClass(a, x.astype(complex))
        t = list(real.table)
        t[0], t[1] = t[1], t[0]
        return BlockPermutation(a, tuple(t))


class _LeadingProjector:
    # keeps the leading sites of the state instead of the sites of the target system
    def project(self, rho, a):
        keep = rho.system.sites[:a.size]
        if _is_quantum(self):
            if a == rho.system:
                return rho
            return DensityMatrix(a, partial_trace_matrix(rho.matrix, rho.system.sites, keep))
        return ValueTuple(a, tuple(rho.values[:a.size]))


class _NaivePlacement:
    # kron in argument order, ignoring where the sites sit in the universe
    def product(self, u, v):
        self.check_disjoint(u.system, v.system)
        return self._wrap(u.system | v.system, np.kron(u.matrix, v.matrix))


class _SignallingProduct:
    # couples the two factors with a controlled flip from A's first site to B's
    def product(self, u, v):
        out = super().product(u, v)
        if u.system.is_empty or v.system.is_empty:
            return out
        a0, b0 = u.system.sites[0], v.system.sites[0]
        ab = out.system
        if _is_quantum(self):
            cnot = self.gate("CNOT", a0, b0)
            rest = ab & ~cnot.system
            if not rest.is_empty:
                cnot = super().product(cnot, self.identity(rest))
            return self.compose(cnot, out)
        tuples = self._tuples(ab.mask)
        index = self._index(ab.mask)
        pa, pb = ab.sites.index(a0), ab.sites.index(b0)
        flip = []
        for t in tuples:
            t = list(t)
            if t[pa] == 1:
                t[pb] = (t[pb] + 1) % self.radix[b0]
            flip.append(index[tuple(t)])
        return self.compose(BlockPermutation(ab, tuple(flip)), out)


class _SquareCollapse:
    # U U is reported as the identity, which breaks associativity for elements of order > 2
    def compose(self, u, v):
        if self.op_equal(u, v):
            return self.identity(u.system)
        return super().compose(u, v)


class _SelfProjectionPermutes:
    # projecting a state onto its own system reverses its site order
    def project(self, rho, a):
        if a != rho.system or a.size < 2:
            return super().project(rho, a)
        if _is_quantum(self):
            order = tuple(reversed(a.sites))
            return DensityMatrix(a, place(rho.matrix, a.sites, order))
        return ValueTuple(a, tuple(reversed(rho.values)))


class _LeakyFactor:
    def factor_through_complement(self, w, a):
        return self.identity(complement(a) & w.system)

    def factor_residual(self, w, a):
        return 0.0


class _MissingFactor:
    def factor_through_complement(self, w, a):
        return None

    def factor_residual(self, w, a):
        return float("inf")


def _phase_sensitive(t: QuantumTheory) -> QuantumTheory:
    return QuantumTheory(t.universe.site_count, t.tolerance, labels=list(t.universe.labels),
                         phase_sensitive=True, name=f"{t.name}+phase_sensitive")


# -- model-level mutations --------------------------------------------------------

class UnpaddedActionModel(LocalRealisticModel):
    """Extends ``u`` to the universe by fixed points / a direct sum, not by ``u x I``."""

    def pad(self, u):
        t = self.theory
        full = self.universe.full
        if _is_quantum(t):
            d = 2 ** full.size
            m = np.eye(d, dtype=complex)
            k = len(u.matrix)
            m[:k, :k] = u.matrix
            return t._wrap(full, m)
        n = t.joint_size(full)
        return BlockPermutation(full, tuple(u.table) + tuple(range(len(u.table), n)))


class WrongPhiModel(LocalRealisticModel):
    def phi(self, rho, n):
        return self.theory.project(rho, n.system)


class UncheckedJoinModel(LocalRealisticModel):
    def common_representative(self, n1, n2):
        return n1.representative


class CoarseEquivalenceModel(LocalRealisticModel):
    """Every pair of global operations is equivalent on every proper subsystem."""

    def equivalent(self, w1, w2, a):
        return True if not a.is_global else super().equivalent(w1, w2, a)

    def class_distance(self, n1, n2):
        if n1.system == n2.system and not n1.system.is_global:
            return 0.0
        return super().class_distance(n1, n2)


class MissingInverseModel(LocalRealisticModel):
    """Tests ``W1 W2`` instead of ``W1 W2^-1`` for membership in the stabilizer."""

    def witness(self, w1, w2, a):
        t = self.theory
        return t.factor_through_complement(t.compose(w1, w2), a)


class StaleLabelProjectorModel(LocalRealisticModel):
    def project(self, n, a):
        super().project(n, a)
        return n


class ReferenceBlindModel(LocalRealisticModel):
    def join_augmented(self, s1, s2):
        return AugmentedNoumenalState(self.join(s1.cls, s2.cls), s1.reference)


class ConstantPhiModel(LocalRealisticModel):
    """phi_rho ignores both rho and the class and reports the all-zero state's marginal."""

    def phi(self, rho, n):
        if not rho.system.is_global:
            return super().phi(rho, n)
        return self.theory.project(_zero_state(self.theory), n.system)


class IdentityAbsorbsModel(LocalRealisticModel):
    """The identity is declared equivalent to everything, but not the other way round."""

    def equivalent(self, w1, w2, a):
        return self.theory.op_equal(w1, self.theory.identity(w1.system)) or super().equivalent(w1, w2, a)


class EmptyDistinguishesModel(LocalRealisticModel):
    """On the empty system, equivalence is equality of operations instead of being total."""

    def equivalent(self, w1, w2, a):
        if a.is_empty:
            return self.theory.op_equal(w1, w2)
        return super().equivalent(w1, w2, a)


def _mark(t, a):
    """A fixed operation on ``a`` that is not the identity (swap of the first two configurations)."""
    if _is_quantum(t):
        x = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2 ** (a.size - 1)))
        return UnitaryClass(a, x.astype(complex))
    table = list(range(t.joint_size(a)))
    table[0], table[1] = table[1], table[0]
    return BlockPermutation(a, tuple(table))


class MarkingProjectorModel(LocalRealisticModel):
    """Projecting onto ``A`` also applies a fixed operation on ``A`` to the representative."""

    def project(self, n, a):
        out = super().project(n, a)
        if a.is_empty:
            return out
        return NoumenalClass(a, self.theory.compose(self.pad(_mark(self.theory, a)), n.representative), self)


class OffsetActionModel(LocalRealisticModel):
    """``U([W]^A)`` applies a fixed extra operation on ``A`` before ``U``."""

    def act(self, u, n):
        out = super().act(u, n)
        if n.system.is_empty:
            return out
        t = self.theory
        return NoumenalClass(n.system, t.compose(out.representative, t.compose(
            t.inverse(n.representative), t.compose(self.pad(_mark(t, n.system)), n.representative))), self)


class TruncatedJoinAllModel(LocalRealisticModel):
    def join_all(self, classes):
        classes = list(classes)
        return super().join_all(classes[:-1] if len(classes) > 1 else classes)


class MisplacedPhiModel(LocalRealisticModel):
    """phi_rho reads the leading sites of W(rho), not the sites of the class."""

    def phi(self, rho, n):
        t = self.theory
        image = t.act(n.representative, rho)
        lead = self.universe.system(*range(n.system.size))
        out = t.project(image, lead)
        return dataclasses.replace(out, system=n.system)


def _zero_state(t):
    empty = t.universe.empty
    if _is_quantum(t):
        nothing = DensityMatrix(empty, np.ones((1, 1), dtype=complex))
    else:
        nothing = ValueTuple(empty, ())
    return t.lift_state(nothing, t.universe.full)


# -- registry ----------------------------------------------------------------------

@dataclass(frozen=True)
class Sabotage:
    name: str
    description: str
    target: str  # "theory" or "model"
    expects: tuple[str, ...]
    apply: Callable[[TheoryContract], TheoryContract] | None = None
    model_cls: type | None = None
    kinds: tuple[str, ...] = ("classical", "quantum")

    def theory(self, base: TheoryContract) -> TheoryContract:
        return self.apply(base) if self.apply else base

    def model(self, base: TheoryContract) -> LocalRealisticModel:
        return (self.model_cls or LocalRealisticModel)(self.theory(base))


def _mixin(cls, tag):
    return lambda t: _rebase(t, cls, tag)


SABOTAGES: dict[str, Sabotage] = {s.name: s for s in [
    Sabotage("swapped_product", "U x V built from V's inverse, reversing the order of composition on B",
             "theory", ("S5.req3.interchange",), _mixin(_SwappedProduct, "swapped_product")),
    Sabotage("reversed_composition", "compose(U, V) returns VU instead of UV",
             "theory", ("S3.def1.action-composition",), _mixin(_ReversedComposition, "reversed_composition")),
    Sabotage("bad_identity", "the identity on a nonempty system swaps its first two configurations",
             "theory", ("S3.group.identity",), _mixin(_BadIdentity, "bad_identity")),
    Sabotage("leading_projector", "projection onto A keeps the leading sites of the state, not A's sites",
             "theory", ("S5.req1.no-signalling",), _mixin(_LeadingProjector, "leading_projector")),
    Sabotage("naive_placement", "U x V is kron(U, V) in argument order regardless of site positions",
             "theory", ("S5.req1.no-signalling",), _mixin(_NaivePlacement, "naive_placement"), kinds=("quantum",)),
    Sabotage("signalling_product", "U x V is followed by a controlled flip from A into B",
             "theory", ("S5.req4.identity",), _mixin(_SignallingProduct, "signalling_product")),
    Sabotage("leaky_factor", "every operation is reported to factor through every complement",
             "theory", ("S5.req5.factor-soundness",), _mixin(_LeakyFactor, "leaky_factor")),
    Sabotage("missing_factor", "no operation is reported to factor through any complement",
             "theory", ("S5.req5.factor-soundness",), _mixin(_MissingFactor, "missing_factor")),
    Sabotage("phase_sensitive", "unitaries compared entrywise, so U and e^{ia}U count as different operations",
             "theory", ("S3.def2.faithful",), _phase_sensitive, kinds=("quantum",)),
    Sabotage("unpadded_action", "the noumenal action extends U by fixed points instead of tensoring with I",
             "model", ("S6.action.well-defined",), model_cls=UnpaddedActionModel),
    Sabotage("wrong_phi", "phi_rho ignores the representative and just projects rho",
             "model", ("S6.phi.action-homomorphism",), model_cls=WrongPhiModel),
    Sabotage("unchecked_join", "the join keeps the first representative without looking for a common one",
             "model", ("S4.3.7.join.projections",), model_cls=UncheckedJoinModel),
    Sabotage("coarse_equivalence", "every pair of global operations is declared equivalent on proper subsystems",
             "model", ("S3.thm1.noumenal-faithful", "S6.join.well-defined"), model_cls=CoarseEquivalenceModel),
    Sabotage("square_collapse", "composing an operation with itself returns the identity",
             "theory", ("S3.group.associativity",), _mixin(_SquareCollapse, "square_collapse"),
             kinds=("classical",)),
    Sabotage("self_projection_permutes", "projecting a state onto its own system reverses its sites",
             "theory", ("S4.3.2.projector.idempotent",), _mixin(_SelfProjectionPermutes, "self_projection_permutes")),
    Sabotage("missing_inverse", "equivalence tests W1 W2 rather than W1 W2^-1 against the stabilizer",
             "model", ("S6.equiv.reflexive",), model_cls=MissingInverseModel),
    Sabotage("stale_label_projector", "the noumenal projector returns the class still labelled by the larger system",
             "model", ("S6.projector.surjective",), model_cls=StaleLabelProjectorModel),
    Sabotage("reference_blind_join", "augmented states are joined even when their reference states differ",
             "model", ("S4.6.augmented.join",), model_cls=ReferenceBlindModel),
    Sabotage("constant_phi", "phi_rho always reports the marginal of the all-zero state",
             "model", ("S6.phi.surjective-coverage",), model_cls=ConstantPhiModel),
    Sabotage("identity_absorbs", "the identity is equivalent to every operation, but not conversely",
             "model", ("S6.equiv.symmetric",), model_cls=IdentityAbsorbsModel, kinds=("classical",)),
    Sabotage("marking_projector", "the noumenal projector applies a fixed swap on the target system",
             "model", ("S6.projector.composition",), model_cls=MarkingProjectorModel),
    Sabotage("empty_distinguishes", "equivalence on the empty system is equality rather than total",
             "model", ("S6.projector.well-defined",), model_cls=EmptyDistinguishesModel),
    Sabotage("offset_action", "the noumenal action applies a fixed swap on A before U",
             "model", ("S6.action.identity",), model_cls=OffsetActionModel),
    Sabotage("truncated_join_all", "the generalized join silently drops its last argument",
             "model", ("S4.3.7.join.generalized",), model_cls=TruncatedJoinAllModel),
    Sabotage("misplaced_phi", "phi_rho reads the leading sites of W(rho) rather than the class's own sites",
             "model", ("S4.3.4.consistent-family",), model_cls=MisplacedPhiModel),
]}


def sabotaged_theory(name: str, base: TheoryContract) -> TheoryContract:
    try:
        return SABOTAGES[name].theory(base)
    except KeyError:
        raise KeyError(f"unknown sabotage {name!r}; known: {', '.join(sorted(SABOTAGES))}") from None


def default_base(kind: str) -> TheoryContract:
    """The theory each sabotage is demonstrated on.

    The classical base has three values per site so that single-site groups
    are non-abelian; on two values every single-site operation is its own
    inverse and order-reversal goes unnoticed.
    """
    if kind == "quantum":
        return QuantumTheory(2)
    spec = ClassicalTheorySpec((("s0", 3), ("s1", 3)), {}, max_joint_size=9)
    return ClassicalTheory(spec, name="classical_3x3")


def full_symmetric_2x2() -> ClassicalTheory:
    spec = ClassicalTheorySpec((("s0", 2), ("s1", 2)), {3: GroupDecl("full")})
    return ClassicalTheory(spec, name="classical_2x2")


def base_for(name: str, kind: str) -> TheoryContract:
    """The sound theory a sabotage is demonstrated on.

    The unpadded action only misbehaves when the global group mixes sites,
    so on the classical side it needs the full symmetric group.
    """
    if name == "unpadded_action" and kind == "classical":
        return full_symmetric_2x2()
    return default_base(kind)


def demonstrate(name: str, kind: str, budget=None) -> list:
    """Run only the checks a sabotage is expected to trip; returns their results."""
    from .core import SamplingBudget
    from .verify import CATALOGUE
    from .verify.context import ModelContext, TheoryContext
    from .verify.runner import run_check

    s = SABOTAGES[name]
    if kind not in s.kinds:
        raise ValueError(f"sabotage {name!r} is not defined for {kind} theories")
    if budget is None:
        budget = (SamplingBudget("exhaustive", seed=1) if kind == "classical"
                  else SamplingBudget("sampled", sample_count=200, seed=1))
    base = base_for(name, kind)
    if s.target == "theory":
        ctx = TheoryContext(s.theory(base), budget)
    else:
        ctx = ModelContext(s.model(base), budget)
    checks = {c.id: c for c in CATALOGUE}
    return [run_check(checks[i], ctx, budget) for i in s.expects]
