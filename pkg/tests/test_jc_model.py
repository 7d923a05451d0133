import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polariton_nhqc.jc_model import (
    JcParams,
    approximate_noise_shifts,
    build_jc_hamiltonian,
    closed_form_splitting,
    dressed_spectrum,
    jc_operators,
    noise_energy_shifts,
    polariton_matrix_elements,
    transition_frequencies,
)

TWO_PI = 2 * np.pi
WC = TWO_PI * 8e9


def test_resonant_defaults():
    p = JcParams.resonant(WC)
    assert p.omega_q == p.omega_c == WC
    assert np.isclose(p.g, WC / 20)
    assert p.detuning == 0


def test_invalid_params():
    with pytest.raises(ValueError):
        JcParams(-1.0, WC, 1.0)
    with pytest.raises(ValueError):
        JcParams(WC, WC, 0.0)
    with pytest.raises(ValueError):
        JcParams(WC, WC, WC / 20, n_fock=2)
    with pytest.warns(UserWarning):
        JcParams(WC, WC, WC / 5)


def test_hamiltonian_is_hermitian_and_conserves_excitations():
    p = JcParams.resonant(WC, n_fock=6)
    H = build_jc_hamiltonian(p)
    assert H.is_hermitian()
    ops = jc_operators(p)
    a, sm = ops["a"].matrix, ops["sm"].matrix
    n_exc = a.conj().T @ a + sm.conj().T @ sm
    assert np.allclose(H.matrix @ n_exc, n_exc @ H.matrix)


def test_transition_frequencies_resonant():
    p = JcParams.resonant(WC)
    w = transition_frequencies(dressed_spectrum(p))
    assert abs(w.minus - (p.omega_c - p.g)) <= 1e-12 * p.omega_c
    assert abs(w.plus - (p.omega_c + p.g)) <= 1e-12 * p.omega_c


def test_dressed_states_at_resonance():
    p = JcParams.resonant(WC)
    b = dressed_spectrum(p)
    s = p.space
    expected_plus = (s.basis_state((0, 1)) + s.basis_state((1, 0))) / np.sqrt(2)
    expected_minus = (s.basis_state((0, 1)) - s.basis_state((1, 0))) / np.sqrt(2)
    assert np.allclose(b.plus, expected_plus)
    assert np.allclose(b.minus, expected_minus)
    vecs = b.eigenvectors()
    assert np.allclose(vecs.conj().T @ vecs, np.eye(p.space.dim))
    H = b.hamiltonian.matrix
    assert np.allclose(vecs.conj().T @ H @ vecs, np.diag(b.eigenvalues()), rtol=0, atol=1e-12 * p.omega_c)


def test_drive_matrix_elements():
    m_minus, m_plus = polariton_matrix_elements(dressed_spectrum(JcParams.resonant(WC)))
    assert np.isclose(m_minus, -1 / np.sqrt(2))
    assert np.isclose(m_plus, 1 / np.sqrt(2))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3.0, 3.0), st.integers(1, 4))
def test_splitting_matches_closed_form(delta_over_g, n):
    g = TWO_PI * 0.4e9
    p = JcParams(WC - delta_over_g * g, WC, g, n_fock=6)
    e = dressed_spectrum(p).energies[n]
    assert abs((e[1] - e[0]) - closed_form_splitting(p, n)) <= 1e-9 * g


@pytest.mark.parametrize("axis, scale", [("x", "omega_q"), ("z", "g")])
def test_noise_shifts_are_second_order(axis, scale):
    p = JcParams.resonant(WC)
    hs = np.geomspace(1e-3, 1e-2, 6) * getattr(p, scale)
    shifts = np.array([noise_energy_shifts(p, h, axis)[:2] for h in hs])
    for k in range(2):
        slope = np.polyfit(np.log(hs), np.log(np.abs(shifts[:, k])), 1)[0]
        assert abs(slope - 2) < 0.1
    approx = np.array([approximate_noise_shifts(p, h, axis) for h in hs])
    assert np.all(np.sign(shifts) == np.sign(approx))


def test_zero_noise_gives_zero_shift():
    s = noise_energy_shifts(JcParams.resonant(WC), 0.0, "z")
    assert s.exact_minus == s.exact_plus == 0.0
    with pytest.raises(ValueError):
        approximate_noise_shifts(JcParams.resonant(WC), 1.0, "y")
