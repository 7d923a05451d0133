import numpy as np
import pytest

from polariton_nhqc.gates_metrics import CNOT, TwoQubitGateSpec
from polariton_nhqc.two_qubit import (
    ANCILLA,
    CoupledParams,
    TwoQubitConfig,
    ancilla_matrix_elements,
    build_coupled_hamiltonian,
    build_problem,
    cnot_report,
    double_excitation_frequencies,
    dressed_sector,
    excitation_number,
    two_qubit_grid_states,
)
from polariton_nhqc.pulses import compile_two_qubit

TWO_PI = 2 * np.pi


@pytest.fixture(scope="module")
def params():
    return CoupledParams.reference(n_fock=4)


def test_sector_layout(params):
    sec = dressed_sector(params)
    assert len(sec.labels) == 13
    v = sec.vectors
    assert np.allclose(v.conj().T @ v, np.eye(13))
    assert sec.energies[sec.index("G", "G")] == 0


def test_coupling_conserves_total_excitations(params):
    seq = compile_two_qubit(np.pi, np.pi / 2, 0.0, "square", params.coupling_peak, TWO_PI * 3.17e9, TWO_PI * 2.7e9)
    H = build_coupled_hamiltonian(params, seq)
    n = np.diag(excitation_number(params)).astype(complex)
    for m in [H.static] + [o for p in H.pieces for o in p.operators]:
        assert np.allclose(m @ n, n @ m)


def test_double_excitation_frequencies(params):
    w = double_excitation_frequencies(params)
    assert np.isclose(w.minus / TWO_PI, 3.1735e9, rtol=1e-4)
    assert np.isclose(w.plus / TWO_PI, 2.7035e9, rtol=1e-4)
    m_mm, m_mp = ancilla_matrix_elements(params)
    assert abs(abs(m_mm) - abs(m_mp)) < 1e-12
    assert 0.8 < abs(m_mm) < 0.9


def test_grid_states_are_products():
    g = two_qubit_grid_states(5, 2)
    assert g.shape == (100, 4)
    assert np.allclose(np.linalg.norm(g, axis=1), 1)
    for psi in g[:10]:
        assert np.linalg.matrix_rank(psi.reshape(2, 2), tol=1e-10) == 1


def test_noiseless_cnot():
    prob = build_problem(CNOT)
    rep = cnot_report(prob)
    assert rep.basis_average >= 0.99
    assert rep.grid_average >= 0.99
    assert len(rep.basis_fidelities) == 5
    res = prob.run((1, 0, 0, 0), n_samples=21)
    # the control-+ block is a spectator: |++> stays put, the ancilla is never populated from it
    assert res.populations["p_pp"].min() > 0.99
    assert res.populations["p_ancilla"].max() < 1e-2
    res = prob.run((0, 0, 0, 1), n_samples=21)
    assert res.populations["p_mp"][-1] > 0.99
    # |--> is half bright at vartheta = pi/2, so the ancilla peaks near 1/2
    assert res.populations["p_ancilla"].max() > 0.4


def test_rotating_frame_cnot_is_near_exact():
    cfg = TwoQubitConfig(frame="rotating")
    for spec in (CNOT, TwoQubitGateSpec(0.6, 1.2, 0.4)):
        assert cnot_report(build_problem(spec, cfg)).grid_average > 1 - 1e-8


def test_truncation_inside_sector_is_exact():
    vals = [cnot_report(build_problem(CNOT, TwoQubitConfig(params=CoupledParams.reference(n_fock=nf),
                                                           frame="rotating"))).basis_average for nf in (3, 6)]
    assert abs(vals[0] - vals[1]) < 1e-12
