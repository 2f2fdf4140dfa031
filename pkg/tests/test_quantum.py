import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noumenal import QuantumTheory
from noumenal.errors import BudgetError, NotASubsystemError, SystemMismatchError
from noumenal.quantum import (
    GATES,
    bell_vectors,
    canonical_phase,
    haar_random_unitary,
    haar_unitary_matrix,
    matrix_to_pairs,
    pairs_to_matrix,
    phase_aligned_distance,
)


def trace_out_second(m):
    """Reference partial trace over the second qubit of a two-qubit operator."""
    return np.einsum("ijkj->ik", m.reshape(2, 2, 2, 2))


def trace_out_first(m):
    return np.einsum("jijk->ik", m.reshape(2, 2, 2, 2))


def test_partial_trace_matches_reference(q2):
    rng = np.random.default_rng(0)
    rho = q2.sample_state(q2.universe.full, rng)
    q0, q1 = q2.universe.system(0), q2.universe.system(1)
    assert np.allclose(q2.project(rho, q0).matrix, trace_out_second(rho.matrix), atol=1e-14)
    assert np.allclose(q2.project(rho, q1).matrix, trace_out_first(rho.matrix), atol=1e-14)
    assert q2.project(rho, q2.universe.empty).matrix.shape == (1, 1)
    with pytest.raises(NotASubsystemError):
        q2.project(q2.project(rho, q0), q1)


def test_product_places_by_site(q2):
    x0, z1 = q2.gate("X", 0), q2.gate("Z", 1)
    assert np.allclose(q2.product(x0, z1).matrix, np.kron(GATES["X"], GATES["Z"]))
    assert q2.op_distance(q2.product(z1, x0), q2.product(x0, z1)) < 1e-15


def test_three_qubit_placement_skips_middle_site():
    t = QuantumTheory(3)
    w = t.product(t.gate("X", 0), t.gate("Z", 2))
    ref = np.kron(np.kron(GATES["X"], np.eye(2)), GATES["Z"])
    assert t.op_distance(t.embed(w), t.unitary(t.universe.full, ref)) < 1e-15


def test_gate_site_order_sets_control():
    t = QuantumTheory(2)
    rho = t.basis(t.universe.full, "01")
    flipped = t.act(t.gate("CNOT", 1, 0), rho)
    assert np.allclose(flipped.matrix, t.basis(t.universe.full, "11").matrix)
    assert np.allclose(t.act(t.gate("CNOT", 0, 1), rho).matrix, rho.matrix)


def test_global_phase_is_invisible(q2):
    u = q2.sample_operation(q2.universe.full, np.random.default_rng(1))
    v = q2.unitary(q2.universe.full, np.exp(0.7j) * u.matrix)
    assert q2.op_distance(u, v) < 1e-15
    assert np.allclose(canonical_phase(u.matrix), canonical_phase(v.matrix))


def test_phase_sensitive_theory_tells_phases_apart():
    t = QuantumTheory(1, phase_sensitive=True)
    u = t.gate("Z", 0)
    v = t.unitary(t.universe.full, -GATES["Z"])
    assert t.op_distance(u, v) > 1


def test_factor_through_complement(q2):
    q0, q1 = q2.universe.system(0), q2.universe.system(1)
    z_on_first = q2.embed(q2.gate("Z", 0))
    v = q2.factor_through_complement(z_on_first, q1)
    assert v is not None and q2.op_distance(v, q2.gate("Z", 0)) < 1e-12
    assert q2.factor_through_complement(q2.gate("CNOT", 0, 1), q0) is None
    assert q2.factor_through_complement(q2.gate("CNOT", 0, 1), q1) is None


def test_bell_marginals_are_maximally_mixed(q2):
    for psi in bell_vectors().values():
        rho = q2.pure(q2.universe.full, psi)
        for a in q2.universe.singletons():
            assert np.linalg.norm(q2.project(rho, a).matrix - np.eye(2) / 2) < 1e-12


def test_haar_sampler_is_unitary_and_seeded():
    a = haar_random_unitary(4, seed=5)
    b = haar_random_unitary(4, seed=5)
    assert np.array_equal(a.matrix, b.matrix)
    assert np.allclose(a.matrix.conj().T @ a.matrix, np.eye(4), atol=1e-12)
    with pytest.raises(BudgetError):
        haar_random_unitary(3, seed=0)


def test_haar_first_moment():
    # E[|U_00|^2] = 1/d for Haar-distributed U
    rng = np.random.default_rng(11)
    vals = [abs(haar_unitary_matrix(4, rng)[0, 0]) ** 2 for _ in range(4000)]
    assert abs(np.mean(vals) - 0.25) < 0.01


def test_sampled_states_are_density_matrices(q2):
    rng = np.random.default_rng(2)
    for _ in range(20):
        assert q2.is_density_matrix(q2.sample_state(q2.universe.full, rng))


def test_constructors_validate(q2):
    with pytest.raises(ValueError):
        q2.unitary(q2.universe.system(0), [[1, 1], [0, 1]])
    with pytest.raises(SystemMismatchError):
        q2.unitary(q2.universe.system(0), np.eye(4))
    with pytest.raises(ValueError):
        q2.density(q2.universe.system(0), [[1, 0], [0, 1]])
    with pytest.raises(BudgetError):
        QuantumTheory(5)


def test_pair_serialization_round_trip():
    m = haar_unitary_matrix(4, np.random.default_rng(3))
    assert np.array_equal(pairs_to_matrix(matrix_to_pairs(m)), m)


def test_phase_aligned_distance_is_phase_blind():
    m = haar_unitary_matrix(2, np.random.default_rng(4))
    assert phase_aligned_distance(m, 1j * m) < 1e-15
    assert phase_aligned_distance(m, GATES["X"] @ m) > 0.1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_no_signalling_random(seed):
    t = QuantumTheory(2)
    rng = np.random.default_rng(seed)
    a, b = t.universe.system(0), t.universe.system(1)
    u, v = t.sample_operation(a, rng), t.sample_operation(b, rng)
    rho = t.sample_state(t.universe.full, rng)
    lhs = t.project(t.act(t.product(u, v), rho), a)
    rhs = t.act(u, t.project(rho, a))
    assert t.state_distance(lhs, rhs) < 1e-12
