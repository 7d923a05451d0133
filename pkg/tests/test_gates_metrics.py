import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from polariton_nhqc.gates_metrics import (
    CNOT,
    HADAMARD,
    NOT,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    LogicalChannel,
    SingleQubitGateSpec,
    TwoQubitGateSpec,
    average_gate_fidelity,
    bright_dark_states,
    fidelity_grid_states,
    project_logical,
    realized_unitary_two,
    rotation_axis,
    state_fidelity,
    target_unitary_single,
    target_unitary_two,
)

angles = st.floats(-2 * np.pi, 2 * np.pi)


def _equal_up_to_phase(a, b):
    k = np.argmax(np.abs(b))
    ph = a.flat[k] / b.flat[k]
    return np.isclose(abs(ph), 1) and np.allclose(a, ph * b)


@settings(max_examples=50, deadline=None)
@given(angles, angles, angles)
def test_single_qubit_target_is_su2_rotation(g, th, ph):
    u = target_unitary_single(SingleQubitGateSpec(g, th, ph))
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    assert np.isclose(np.linalg.det(u), 1)
    nx, ny, nz = rotation_axis(th, ph)
    ref = expm(-0.5j * g * (nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z))
    assert np.abs(u - ref).max() < 1e-12


@settings(max_examples=50, deadline=None)
@given(angles, angles, angles)
def test_two_qubit_target_is_controlled_rotation(a, th, ph):
    spec = TwoQubitGateSpec(a, th, ph)
    u = target_unitary_two(spec)
    assert np.abs(u[:2, :2] - np.eye(2)).max() < 1e-12
    assert np.abs(u[:2, 2:]).max() == 0 and np.abs(u[2:, :2]).max() == 0
    assert np.abs(u[2:, 2:] - target_unitary_single(SingleQubitGateSpec(a, th, ph))).max() < 1e-12
    r = realized_unitary_two(spec)
    assert np.allclose(r[2:, 2:], np.exp(-0.5j * a) * u[2:, 2:])


def test_named_gates():
    assert _equal_up_to_phase(target_unitary_single(NOT), PAULI_X)
    had = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert _equal_up_to_phase(target_unitary_single(HADAMARD), had)
    u = realized_unitary_two(CNOT)
    assert np.allclose(u[2:, 2:], -PAULI_X)
    assert SingleQubitGateSpec.from_pi_units(1, 0.5, 0) == NOT


@settings(max_examples=30, deadline=None)
@given(angles, angles)
def test_bright_dark_orthonormal(th, ph):
    e = np.eye(2, dtype=complex)
    b, d = bright_dark_states(th, ph, e[0], e[1])
    assert np.isclose(np.vdot(b, b), 1) and np.isclose(np.vdot(d, d), 1)
    assert abs(np.vdot(b, d)) < 1e-12


def test_grid_shape_and_normalisation():
    g = fidelity_grid_states()
    assert g.shape == (2211, 2)
    assert np.allclose(np.linalg.norm(g, axis=1), 1)


def test_projection_and_leakage():
    basis = [np.array([0, 1, 0], complex), np.array([0, 0, 1], complex)]
    psi = np.array([0.6, 0.8, 0], complex)
    rho_l, leak = project_logical(psi, basis)
    assert np.isclose(leak, 0.36)
    assert np.isclose(rho_l[0, 0], 0.64)
    rho_l2, leak2 = project_logical(np.outer(psi, psi.conj()), basis)
    assert np.allclose(rho_l, rho_l2) and np.isclose(leak, leak2)
    with pytest.raises(ValueError):
        project_logical(psi, [basis[0], basis[0]])


def test_state_fidelity_checks_dimensions():
    assert np.isclose(state_fidelity(np.array([1, 0]), np.array([1, 0])), 1)
    with pytest.raises(ValueError):
        state_fidelity(np.eye(3), np.array([1, 0]))


def _unitary_channel(u):
    d = u.shape[0]
    outputs = np.zeros((d, d, d, d), complex)
    for i in range(d):
        for j in range(d):
            outputs[i, j] = np.outer(u[:, i], u[:, j].conj())
    return LogicalChannel(outputs)


def test_perfect_channel_has_unit_fidelity():
    u = target_unitary_single(HADAMARD)
    ch = _unitary_channel(u)
    assert np.isclose(average_gate_fidelity(ch, u), 1)
    assert np.isclose(ch.process_fidelity(u), 1)
    assert np.isclose(ch.haar_average_fidelity(u), 1)


def test_haar_average_matches_sampled_mean():
    # depolarised NOT gate: F_avg = 1 - p/2 for d = 2
    u = target_unitary_single(NOT)
    p = 0.1
    base = _unitary_channel(u).outputs
    outputs = (1 - p) * base
    for i in range(2):
        outputs[i, i] += p * np.eye(2) / 2
    ch = LogicalChannel(outputs)
    assert np.isclose(ch.haar_average_fidelity(u), 1 - p / 2)
    rng = np.random.default_rng(0)
    states = rng.normal(size=(4000, 2)) + 1j * rng.normal(size=(4000, 2))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    assert abs(average_gate_fidelity(ch, u, states) - (1 - p / 2)) < 5e-3
