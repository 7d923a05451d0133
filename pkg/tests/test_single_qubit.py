import numpy as np
import pytest

from polariton_nhqc.dynamics import NoiseModel
from polariton_nhqc.gates_metrics import HADAMARD, NOT, SingleQubitGateSpec
from polariton_nhqc.single_qubit import REFERENCE_NOISE, SingleQubitConfig, build_problem, run_single_qubit_gate


def test_config_validation():
    with pytest.raises(ValueError):
        SingleQubitConfig(drive_model="bogus")
    with pytest.raises(ValueError):
        SingleQubitConfig(frame="bogus")
    assert np.isclose(SingleQubitConfig().omega0, 2 * np.pi * 8e9 / 400)


def test_trace_starts_in_plus():
    res = run_single_qubit_gate(NOT)
    assert res.populations["p_plus"][0] == 1 and res.populations["p_G"][0] == 0
    assert np.isclose(res.fidelity[0], 0)  # NOT maps |+> to |->
    assert res.fidelity[-1] >= 0.995
    assert res.populations["p_G"][-1] < 5e-3


@pytest.mark.parametrize("dct", [True, False])
def test_rotating_frame_is_near_exact(dct):
    cfg = SingleQubitConfig(frame="rotating", dct=dct)
    for spec in (NOT, HADAMARD, SingleQubitGateSpec(0.7, 1.1, 0.3)):
        assert build_problem(spec, cfg).average_fidelity(21, 5) > 1 - 1e-8


def test_channel_agrees_with_state_runs():
    prob = build_problem(HADAMARD)
    ch = prob.channel()
    psi = np.array([0.6, 0.8j])
    res = prob.run(psi, n_samples=2)
    assert np.allclose(ch(psi), res.logical[-1], atol=1e-10)


def test_noisy_channel_agrees_with_state_runs():
    prob = build_problem(NOT, noise=REFERENCE_NOISE)
    psi = np.array([0.0, 1.0])
    res = prob.run(psi, n_samples=2)
    assert np.allclose(prob.channel()(psi), res.logical[-1], atol=1e-10)
    assert res.states.ndim == 3
    assert res.drift < 1e-6


def test_noise_lowers_fidelity():
    clean = build_problem(NOT).run(n_samples=2).fidelity[-1]
    noisy = build_problem(NOT, noise=NoiseModel(gamma2=2 * np.pi * 20e3)).run(n_samples=2).fidelity[-1]
    assert noisy < clean
