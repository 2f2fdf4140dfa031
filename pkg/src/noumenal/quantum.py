"""Finite-dimensional unitary quantum theory on qubit sites.

Phenomenal states are density matrices, operations are unitaries modulo a
global phase, projection is the partial trace and the product is the
tensor product placed according to site order.  Site 0 is the most
significant tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DEFAULT_TOLERANCE, TheoryContract
from .errors import BudgetError, NotASubsystemError, SystemMismatchError
from .lattice import SiteUniverse, System, complement, is_subsystem

MAX_QUBITS = 4
POSITIVITY_SLACK = 1e-10
PHASE_THRESHOLD = 1e-6

_S2 = np.sqrt(0.5)
GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}
GATE_ARITY = {name: int(np.log2(m.shape[0])) for name, m in GATES.items()}


def canonical_phase(m: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first entry of modulus above 1e-6 is real and positive."""
    flat = m.reshape(-1)
    idx = np.flatnonzero(np.abs(flat) > PHASE_THRESHOLD)
    if idx.size == 0:
        return m
    z = flat[idx[0]]
    return m * (abs(z) / z)


def phase_aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min |u - eta v|_F`` over unit complex ``eta``, divided by ``sqrt(dim)``."""
    overlap = np.vdot(v, u)
    eta = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(u - eta * v) / np.sqrt(u.shape[0]))


@dataclass(frozen=True, eq=False)
class UnitaryClass:
    """A unitary modulo global phase; ``matrix`` is the phase-canonical representative."""

    system: System
    matrix: np.ndarray

    def __repr__(self) -> str:
        return f"UnitaryClass({self.system.name()}, dim={self.matrix.shape[0]})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    system: System
    matrix: np.ndarray

    def __repr__(self) -> str:
        return f"DensityMatrix({self.system.name()}, dim={self.matrix.shape[0]})"


# -- tensor index plumbing --------------------------------------------------------

def _positions(sites, sub):
    return [k for k, s in enumerate(sites) if s in sub]


def partial_trace_matrix(m: np.ndarray, sites: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Trace out every site of ``sites`` not in ``keep``; works for any operator, not only states."""
    n = len(sites)
    kp = _positions(sites, set(keep))
    tp = [k for k in range(n) if k not in kp]
    t = m.reshape((2,) * (2 * n))
    t = t.transpose(kp + tp + [n + k for k in kp] + [n + k for k in tp])
    dk, dt = 2 ** len(kp), 2 ** len(tp)
    return np.einsum("ajbj->ab", t.reshape(dk, dt, dk, dt))


def place(m: np.ndarray, order: tuple[int, ...], target: tuple[int, ...]) -> np.ndarray:
    """Reorder the tensor factors of ``m`` from site order ``order`` to site order ``target``."""
    if tuple(order) == tuple(target):
        return m
    n = len(order)
    perm = [order.index(s) for s in target]
    t = m.reshape((2,) * (2 * n)).transpose(perm + [n + p for p in perm])
    return t.reshape(2**n, 2**n)


def kron_placed(ma: np.ndarray, a_sites, mb: np.ndarray, b_sites) -> np.ndarray:
    """``ma (x) mb`` with factors sorted by site index."""
    order = tuple(a_sites) + tuple(b_sites)
    return place(np.kron(ma, mb), order, tuple(sorted(order)))


def haar_unitary_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix with the diagonal phases of R divided out."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Trace out a Haar-random pure state on the system doubled by an equal-size ancilla."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    g /= np.linalg.norm(g)
    return g @ g.conj().T


def haar_random_unitary(dim: int, seed: int, system: System | None = None) -> UnitaryClass:
    if dim < 1 or dim & (dim - 1) or dim > 2**MAX_QUBITS:
        raise BudgetError(f"dimension {dim} must be a power of two at most {2**MAX_QUBITS}")
    n = dim.bit_length() - 1
    if system is None:
        system = SiteUniverse.of_size(max(n, 1), prefix="q").full if n else SiteUniverse(["q0"]).empty
    m = haar_unitary_matrix(dim, np.random.default_rng(seed))
    return UnitaryClass(system, canonical_phase(m))


class QuantumTheory(TheoryContract):
    """Unitary quantum theory on ``n`` qubits.

    ``phase_sensitive=True`` gives the raw theory whose operations are
    unitaries rather than classes; its action is not faithful, which is what
    :func:`noumenal.core.faithfulize` repairs.
    """

    def __init__(self, n_qubits: int, tolerance: float = DEFAULT_TOLERANCE, *,
                 labels=None, max_qubits: int = MAX_QUBITS, phase_sensitive: bool = False,
                 name: str = "quantum"):
        if not 1 <= n_qubits <= max_qubits:
            raise BudgetError(f"{n_qubits} qubits outside 1..{max_qubits}")
        self.universe = SiteUniverse(labels or [f"q{i}" for i in range(n_qubits)])
        self.tolerance = tolerance
        self.phase_sensitive = phase_sensitive
        self.name = name

    def dim(self, a: System) -> int:
        return 2**a.size

    # -- constructors ----------------------------------------------------------
    def unitary(self, a: System, m) -> UnitaryClass:
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.dim(a), self.dim(a)):
            raise SystemMismatchError(f"{a!r} needs a {self.dim(a)}x{self.dim(a)} matrix, got {m.shape}")
        if np.linalg.norm(m.conj().T @ m - np.eye(len(m))) > 1e-8:
            raise ValueError("matrix is not unitary")
        return UnitaryClass(a, m if self.phase_sensitive else canonical_phase(m))

    def gate(self, name: str, *sites) -> UnitaryClass:
        """A named gate on the given sites, in the order they are listed (control first for CNOT)."""
        m = GATES[name]
        idx = tuple(self.universe.index(s) if isinstance(s, str) else int(s) for s in sites)
        if len(idx) != GATE_ARITY[name]:
            raise ValueError(f"{name} acts on {GATE_ARITY[name]} sites")
        return self.unitary(self.universe.system(*idx), place(m, idx, tuple(sorted(idx))))

    def density(self, a: System, m) -> DensityMatrix:
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.dim(a), self.dim(a)):
            raise SystemMismatchError(f"{a!r} needs a {self.dim(a)}x{self.dim(a)} matrix, got {m.shape}")
        if np.linalg.norm(m - m.conj().T) > 1e-8 or abs(np.trace(m) - 1) > 1e-8:
            raise ValueError("density matrix must be Hermitian with unit trace")
        if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -POSITIVITY_SLACK:
            raise ValueError("density matrix is not positive semidefinite")
        return DensityMatrix(a, m)

    def pure(self, a: System, psi) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return DensityMatrix(a, np.outer(psi, psi.conj()))

    def basis(self, a: System, bits: str) -> DensityMatrix:
        psi = np.zeros(self.dim(a), dtype=complex)
        psi[int(bits, 2) if bits else 0] = 1
        return DensityMatrix(a, np.outer(psi, psi.conj()))

    # -- contract ---------------------------------------------------------------
    def identity(self, a):
        return UnitaryClass(a, np.eye(self.dim(a), dtype=complex))

    def _wrap(self, a, m):
        return UnitaryClass(a, m if self.phase_sensitive else canonical_phase(m))

    def compose(self, u, v):
        self.check_same_system(u, v)
        return self._wrap(u.system, u.matrix @ v.matrix)

    def inverse(self, u):
        return self._wrap(u.system, u.matrix.conj().T)

    def act(self, u, rho):
        self.check_same_system(u, rho)
        return DensityMatrix(rho.system, u.matrix @ rho.matrix @ u.matrix.conj().T)

    def project(self, rho, a):
        if not is_subsystem(a, rho.system):
            raise NotASubsystemError(f"{a!r} is not a subsystem of {rho.system!r}")
        if a == rho.system:
            return rho
        return DensityMatrix(a, partial_trace_matrix(rho.matrix, rho.system.sites, a.sites))

    partial_trace = project

    def product(self, u, v):
        self.check_disjoint(u.system, v.system)
        m = kron_placed(u.matrix, u.system.sites, v.matrix, v.system.sites)
        return self._wrap(u.system | v.system, m)

    tensor_classes = product

    def _factor(self, w, a):
        """Candidate ``V`` on the complement of ``a`` and the relative residual of ``w - I x V``."""
        a = a & w.system
        rest = complement(a) & w.system
        m = w.matrix
        da = self.dim(a)
        v = partial_trace_matrix(m, w.system.sites, rest.sites) / da
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            return None, float("inf")
        v = v * (np.sqrt(len(v)) / norm)
        rebuilt = kron_placed(np.eye(da, dtype=complex), a.sites, v, rest.sites)
        if self.phase_sensitive:
            resid = np.linalg.norm(m - rebuilt)
        else:
            resid = phase_aligned_distance(m, rebuilt) * np.sqrt(len(m))
        unitarity = np.linalg.norm(v.conj().T @ v - np.eye(len(v))) / len(v)
        return self._wrap(rest, v), float(max(resid / np.linalg.norm(m), unitarity))

    def factor_residual(self, w, a):
        return self._factor(w, a)[1]

    def factor_through_complement(self, w, a):
        v, resid = self._factor(w, a)
        return v if resid <= self.tolerance else None

    factor_quantum = factor_through_complement

    def op_distance(self, u, v):
        if u.system != v.system:
            return float("inf")
        if self.phase_sensitive:
            return float(np.linalg.norm(u.matrix - v.matrix) / np.sqrt(len(u.matrix)))
        return phase_aligned_distance(u.matrix, v.matrix)

    def state_distance(self, rho, sigma):
        if rho.system != sigma.system:
            return float("inf")
        return float(np.linalg.norm(rho.matrix - sigma.matrix))

    def sample_operation(self, a, rng):
        return self._wrap(a, haar_unitary_matrix(self.dim(a), rng))

    def sample_state(self, a, rng):
        return DensityMatrix(a, random_density_matrix(self.dim(a), rng))

    def alternate_representative(self, u, rng):
        eta = np.exp(2j * np.pi * rng.random())
        return UnitaryClass(u.system, eta * u.matrix)

    def serialize_op(self, u):
        return {"system": u.system.name(), "matrix": matrix_to_pairs(canonical_phase(u.matrix))}

    def serialize_state(self, rho):
        return {"system": rho.system.name(), "matrix": matrix_to_pairs(rho.matrix)}

    def local_alignment(self, w, a):
        """Best ``Q`` on ``a`` with ``w ~ Q x R`` across the cut ``a | rest``, or None.

        Uses the leading operator-Schmidt component, so the answer is exact
        whenever ``w`` is a product across that cut.
        """
        a = a & w.system
        rest = complement(a) & w.system
        da, dr = self.dim(a), self.dim(rest)
        m = place(w.matrix, w.system.sites, a.sites + rest.sites)
        t = m.reshape(da, dr, da, dr).transpose(0, 2, 1, 3).reshape(da * da, dr * dr)
        u, s, _ = np.linalg.svd(t)
        q = u[:, 0].reshape(da, da)
        q = q * (np.sqrt(da) / np.linalg.norm(q))
        if np.linalg.norm(q.conj().T @ q - np.eye(da)) > 1e-6:
            return None
        return self._wrap(a, q)

    def is_operation(self, u) -> bool:
        m = u.matrix
        return u.matrix.shape == (self.dim(u.system),) * 2 and bool(
            np.linalg.norm(m.conj().T @ m - np.eye(len(m))) <= 1e-8)

    def lift_state(self, sigma, b):
        """``sigma`` tensored with ``|0...0><0...0|`` on the rest of ``b``."""
        if not is_subsystem(sigma.system, b):
            raise NotASubsystemError(f"{sigma.system!r} is not a subsystem of {b!r}")
        rest = b & complement(sigma.system)
        zero = np.zeros((self.dim(rest),) * 2, dtype=complex)
        zero[0, 0] = 1
        return DensityMatrix(b, kron_placed(sigma.matrix, sigma.system.sites, zero, rest.sites))

    def is_density_matrix(self, rho, tol: float = 1e-9) -> bool:
        m = rho.matrix
        herm = np.linalg.norm(m - m.conj().T) <= tol
        unit = abs(np.trace(m) - 1) <= tol
        return bool(herm and unit and np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -POSITIVITY_SLACK)


def matrix_to_pairs(m: np.ndarray) -> list:
    """Row-major list of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def pairs_to_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


@lru_cache(maxsize=None)
def bell_vectors() -> dict[str, np.ndarray]:
    s = np.sqrt(0.5)
    return {
        "phi+": np.array([s, 0, 0, s], dtype=complex),
        "phi-": np.array([s, 0, 0, -s], dtype=complex),
        "psi+": np.array([0, s, s, 0], dtype=complex),
        "psi-": np.array([0, s, -s, 0], dtype=complex),
    }
