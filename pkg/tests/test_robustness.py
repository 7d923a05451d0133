import numpy as np
import pytest

from polariton_nhqc.gates_metrics import HADAMARD, NOT, SingleQubitGateSpec, average_gate_fidelity, fidelity_grid_states
from polariton_nhqc.robustness import (
    BaselineModel,
    ErrorInjection,
    baseline_nhqc_gate,
    inject_errors,
    sweep_error,
    with_errors,
)
from polariton_nhqc.single_qubit import SingleQubitConfig, build_problem

GRID = dict(n_theta=11, n_phi=3)


def test_error_guard():
    with pytest.raises(ValueError):
        ErrorInjection(delta=0.6)
    with pytest.raises(ValueError):
        ErrorInjection(epsilon=-0.51)
    assert ErrorInjection().is_zero


def test_zero_injection_is_identity():
    prob = build_problem(NOT)
    assert with_errors(prob, ErrorInjection()) is prob
    H = inject_errors(prob.hamiltonian, 0.0, 0.0, prob.config.omega0, prob.sz)
    assert H is prob.hamiltonian


def test_injected_terms_have_expected_form():
    prob = build_problem(NOT)
    w0 = prob.config.omega0
    H = inject_errors(prob.hamiltonian, 0.1, 0.0, w0, prob.sz)
    assert np.allclose(H.static - prob.hamiltonian.static, 0.05 * w0 * prob.sz)
    Hx = inject_errors(prob.hamiltonian, 0.0, 0.1, w0, prob.sz)
    t = 0.3 * prob.duration
    base = prob.hamiltonian(t) - prob.hamiltonian.static
    assert np.allclose(Hx(t) - Hx.static, 1.1 * base)
    # between segments (after the end) the drive and hence the X error vanish
    assert np.allclose(Hx(prob.duration * 2) - Hx.static, 0)


def test_baseline_noiseless_and_identity():
    assert baseline_nhqc_gate(HADAMARD, **GRID) >= 0.999
    assert baseline_nhqc_gate(SingleQubitGateSpec(0.9, 0.7, 1.3), **GRID) >= 0.999
    ident = SingleQubitGateSpec(0.0, np.pi / 2, 0.0)
    assert baseline_nhqc_gate(ident, epsilon=0.1, **GRID) > 1 - 1e-10
    assert np.allclose(BaselineModel().sz(), np.diag([-1, 1, 0]))


def test_sweep_zero_fraction_matches_plain_run():
    cfg = SingleQubitConfig(frame="rotating")
    res = sweep_error("z", [-0.05, 0.0, 0.05], ["polariton-dct", "baseline-nhqc"], config=cfg, **GRID)
    assert res.fractions.tolist() == [-0.05, 0.0, 0.05]
    plain = average_gate_fidelity(build_problem(HADAMARD, cfg).channel(), build_problem(HADAMARD, cfg).target,
                                  fidelity_grid_states(**GRID))
    assert res.column("polariton-dct")[1] == plain
    assert res.column("polariton-dct")[0] < res.column("polariton-dct")[1]
    for col in res.fidelities.values():
        assert np.all((0 <= col) & (col <= 1))


def test_sweep_rejects_bad_input():
    with pytest.raises(ValueError):
        sweep_error("y", [0.0])
    with pytest.raises(ValueError):
        sweep_error("z", [0.0], ["nonsense"])
