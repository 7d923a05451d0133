import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polariton_nhqc.dynamics import (
    IntegrationAccuracyError,
    NoiseModel,
    Piece,
    ResolutionError,
    TimeDependentHamiltonian,
    evolve_lindblad,
    evolve_unitary,
    lab_frame_hamiltonian,
    propagate_densities,
    propagate_vectors,
    restrict_open_system,
    rwa_hamiltonian,
    secular_components,
    secular_part,
    spectral_range,
    time_average,
    to_rotating_frame,
)
from polariton_nhqc.pulses import compile_single_loop

TWO_PI = 2 * np.pi
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([-1.0, 1.0]).astype(complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)


def _constant_drive(omega, T, op=SX, static=None):
    static = np.zeros((2, 2), complex) if static is None else static
    piece = Piece(0.0, T, (op,), lambda t: np.full((1, np.size(t)), omega / 2))
    return TimeDependentHamiltonian(static, (piece,), max_frequency=omega)


def test_rabi_oscillation_matches_closed_form():
    omega = TWO_PI * 10e6
    T = 3 * TWO_PI / omega
    H = _constant_drive(omega, T)
    t = np.linspace(0, T, 31)
    res = evolve_unitary(H, np.array([1, 0], complex), t)
    p1 = np.abs(res.states[:, 1]) ** 2
    assert np.allclose(p1, np.sin(omega * t / 2) ** 2, atol=1e-9)
    assert res.drift < 1e-9


def test_amplitude_damping_and_dephasing_rates():
    r = 1e6
    H = TimeDependentHamiltonian(np.diag([0.0, TWO_PI * 1e7]), max_frequency=TWO_PI * 1e7)
    t = np.linspace(0, 2e-6, 11)
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    res = evolve_lindblad(H, rho0, [(r, SM)], t)
    assert np.allclose(res.states[:, 1, 1].real, 0.5 * np.exp(-r * t), atol=1e-9)
    assert np.allclose(np.abs(res.states[:, 0, 1]), 0.5 * np.exp(-r * t / 2), atol=1e-9)
    deph = propagate_densities(H, rho0, [(r, SZ)], t)
    assert np.allclose(np.abs(deph[:, 0, 1]), 0.5 * np.exp(-2 * r * t), atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1e6), st.floats(0.0, 1e6), st.floats(0.0, 1e6), st.integers(0, 1000))
def test_lindblad_preserves_trace_hermiticity_positivity(k, g1, g2, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    H = _constant_drive(TWO_PI * 5e6, 2e-7, static=np.diag([0.0, TWO_PI * 2e7]))
    H = TimeDependentHamiltonian(H.static, H.pieces, max_frequency=TWO_PI * 2e7)
    noise = NoiseModel(k, g1, g2)
    diss = noise.dissipators(SM, SM, SZ)
    states = propagate_densities(H, np.outer(psi, psi.conj()), diss, np.linspace(0, 2e-7, 9))
    assert np.allclose(np.trace(states, axis1=1, axis2=2), 1, atol=1e-9)
    assert np.max(np.linalg.norm(states - np.conj(np.transpose(states, (0, 2, 1))), axis=(1, 2))) < 1e-10
    assert np.min(np.linalg.eigvalsh(states)) > -1e-10
    purity = np.real(np.einsum("tij,tji->t", states, states))
    assert purity.max() <= 1 + 1e-8


def test_too_coarse_step_rejected():
    H = _constant_drive(TWO_PI * 1e9, 1e-8)
    with pytest.raises(ResolutionError):
        propagate_vectors(H, np.array([1, 0], complex), [0, 1e-8], step=TWO_PI / (TWO_PI * 1e9) / 10)
    with pytest.raises(ValueError):
        propagate_vectors(H, np.array([1, 0], complex), [0.0])


def test_trace_drift_guard():
    H = TimeDependentHamiltonian(np.zeros((2, 2)), max_frequency=1.0)
    with pytest.raises(IntegrationAccuracyError):
        # a non-physical "dissipator" normalisation is caught by the drift check
        evolve_lindblad(TimeDependentHamiltonian(-0.5j * np.eye(2), max_frequency=1.0), np.eye(2) / 2, [], [0, 1e-3])
    assert evolve_lindblad(H, np.eye(2) / 2, [], [0, 1.0]).drift < 1e-12


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(-1.0)
    assert NoiseModel().is_noiseless
    assert NoiseModel(0, 1.0).dissipators(SM, SM, SZ) == [(1.0, SM)]


def test_vector_and_density_paths_agree():
    seq = compile_single_loop(np.pi, np.pi / 3, 0.4, "square", TWO_PI * 20e6, TWO_PI * 1e9, TWO_PI * 1.2e9)
    e = np.array([0.0, TWO_PI * 1e9, TWO_PI * 1.2e9])
    v = np.zeros((3, 3), complex)
    v[1, 0], v[2, 0] = -1, 1
    H = lab_frame_hamiltonian(np.diag(e), v + v.conj().T, seq)
    psi0 = np.array([0, 0.6, 0.8], complex)
    t = np.linspace(0, seq.duration, 5)
    psi = propagate_vectors(H, psi0, t)
    rho = propagate_densities(H, np.outer(psi0, psi0.conj()), [], t)
    assert np.allclose(rho, np.einsum("ti,tj->tij", psi, psi.conj()), atol=1e-10)


def test_rotating_frame_and_time_average():
    w = TWO_PI * 1e9
    omega = TWO_PI * 10e6
    static = np.diag([0.0, w])
    H = TimeDependentHamiltonian(static, (Piece(0, 1, (SX,), lambda t: np.atleast_2d(omega * np.cos(w * np.asarray(t)))),),
                                 max_frequency=w)
    Hr = to_rotating_frame(H, static)
    avg = time_average(Hr, 0.0, TWO_PI / w)
    assert np.allclose(avg, 0.5 * omega * SX, atol=1e-6 * omega)
    assert np.allclose(to_rotating_frame(TimeDependentHamiltonian(static), static)(0.3), 0)


def test_rwa_hamiltonian_couplings():
    seq = compile_single_loop(np.pi, np.pi / 2, 0.0, "square", TWO_PI * 20e6, TWO_PI * 1e9, TWO_PI * 1.2e9)
    e = np.array([0.0, TWO_PI * 1e9, TWO_PI * 1.2e9])
    v = np.zeros((3, 3), complex)
    v[1, 0], v[2, 0] = -1, 1
    H = rwa_hamiltonian(e, v + v.conj().T, seq)
    h0 = H(0.0)
    seg = seq.segments[0]
    a1, a2 = seg.tone_amplitudes(0.0)
    assert np.isclose(h0[1, 0], -0.5 * a1 * np.exp(1j * seg.phi1))
    assert np.isclose(h0[2, 0], 0.5 * a2 * np.exp(1j * seg.phi2))
    assert h0[2, 1] == 0


def test_secular_split_reassembles():
    rng = np.random.default_rng(3)
    op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    e = np.array([0.0, 1.0, 1.0, 3.0])
    parts = secular_components(op, e)
    assert np.allclose(sum(parts), op)
    sp = secular_part(op, e)
    assert sp[1, 2] == op[1, 2] and sp[0, 1] == 0
    assert np.isclose(spectral_range(np.diag(e)), 3.0)


def test_restricted_block_matches_full_run():
    # three levels, block {1, 2}: 2 -> 1 decay stays inside, 1 -> 0 leaves
    w = TWO_PI * 1e8
    static = np.diag([0.0, w, 2.1 * w]).astype(complex)
    drive = np.zeros((3, 3), complex)
    drive[1, 2] = drive[2, 1] = 1
    piece = Piece(0, 1e-7, (drive,), lambda t: np.full((1, np.size(t)), TWO_PI * 5e6))
    H = TimeDependentHamiltonian(static, (piece,), max_frequency=2.1 * w)
    low = np.zeros((3, 3), complex)
    low[0, 1] = low[1, 2] = 1
    diss = [(2e6, low), (1e6, np.diag([0.0, 1.0, -1.0]))]
    rho0 = np.zeros((3, 3), complex)
    rho0[1:, 1:] = [[0.5, 0.5j], [-0.5j, 0.5]]
    t = np.linspace(0, 1e-7, 3)
    full = propagate_densities(H, rho0, diss, t)[:, 1:, 1:]
    Hb, inside = restrict_open_system(H, diss, [1, 2])
    block = propagate_densities(Hb, rho0[1:, 1:], inside, t)
    assert np.allclose(block, full, atol=1e-10)
    drive[0, 1] = drive[1, 0] = 1
    with pytest.raises(ValueError):
        restrict_open_system(TimeDependentHamiltonian(static, (Piece(0, 1, (drive,), piece.coefficients),)), diss, [1, 2])
