"""Local-realistic models of reversible no-signalling theories.

Finite classical theories and unitary quantum theory are provided; both
expose the same :class:`~noumenal.core.TheoryContract`, from which
:func:`build_local_model` constructs noumenal states as classes of global
operations.
"""
from .classical import ClassicalTheory, ClassicalTheorySpec, GroupDecl, classical_cnot, enumerate_group
from .construction import (
    AugmentedNoumenalState,
    LocalRealisticModel,
    NoumenalClass,
    build_local_model,
    equivalent,
    join,
    noumenal_act,
    noumenal_project,
    phi_rho,
)
from .core import FaithfulQuotient, SamplingBudget, TheoryContract, faithfulize
from .errors import (
    BudgetError,
    ConstructionRefused,
    IncompatibleClassesError,
    NotASubsystemError,
    NotDisjointError,
    NoumenalError,
    SystemMismatchError,
    TheoryLoadError,
    UniverseMismatchError,
)
from .lattice import SiteUniverse, System
from .quantum import DensityMatrix, QuantumTheory, UnitaryClass

__version__ = "0.1.0"
