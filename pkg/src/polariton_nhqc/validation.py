"""Invariant and property checks, runnable without any reference numbers."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .dynamics import DEFAULT_STEPS_PER_PERIOD, NoiseModel, propagate_vectors
from .gates_metrics import (
    CNOT,
    HADAMARD,
    NOT,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SingleQubitGateSpec,
    TwoQubitGateSpec,
    bright_dark_states,
    rotation_axis,
    state_fidelity,
    target_unitary_single,
    target_unitary_two,
)
from . import single_qubit, two_qubit

REFERENCE_NOISE = single_qubit.REFERENCE_NOISE


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.1f} s)"


def check_density_invariants() -> CheckResult:
    """Trace, Hermiticity and purity along a noisy NOT run; purity 1 without noise."""
    res = single_qubit.run_single_qubit_gate(NOT, noise=REFERENCE_NOISE)
    rho = res.states
    trace_err = np.max(np.abs(np.real(np.trace(rho, axis1=1, axis2=2)) - 1))
    herm_err = np.max(np.linalg.norm(rho - np.conj(np.transpose(rho, (0, 2, 1))), axis=(1, 2)))
    purity = np.real(np.einsum("tij,tji->t", rho, rho))
    clean = single_qubit.build_problem(NOT).run()
    clean_purity = np.abs(np.linalg.norm(clean.states, axis=1) ** 2 - 1).max()
    ok = trace_err < 1e-6 and herm_err < 1e-8 and purity.max() <= 1 + 1e-8 and clean_purity < 1e-6
    return CheckResult("density-matrix invariants", ok,
                       f"trace err {trace_err:.1e}, hermiticity {herm_err:.1e}, max purity {purity.max():.9f}, "
                       f"noiseless purity err {clean_purity:.1e}")


def check_step_halving() -> CheckResult:
    f = []
    for spp in (DEFAULT_STEPS_PER_PERIOD, 2 * DEFAULT_STEPS_PER_PERIOD):
        cfg = single_qubit.SingleQubitConfig(steps_per_period=spp)
        f.append(single_qubit.run_single_qubit_gate(NOT, cfg).fidelity[-1])
    diff = abs(f[0] - f[1])
    return CheckResult("step-halving convergence", diff < 1e-7, f"|dF| = {diff:.2e} (limit 1e-7)")


def check_fock_truncation() -> CheckResult:
    vals = []
    for nf in (5, 7):
        cfg = two_qubit.TwoQubitConfig(params=two_qubit.CoupledParams.reference(n_fock=nf))
        vals.append(two_qubit.cnot_report(two_qubit.build_problem(CNOT, cfg)).basis_average)
    diff = abs(vals[0] - vals[1])
    return CheckResult("Fock truncation convergence", diff < 1e-4, f"CNOT |dF| (5 vs 7) = {diff:.2e} (limit 1e-4)")


def _rwa_problem(theta: float, phi: float):
    cfg = single_qubit.SingleQubitConfig(frame="rotating", dct=False)
    return single_qubit.build_problem(SingleQubitGateSpec(np.pi, theta, phi), cfg)


def check_dark_state(theta: float = 0.7, phi: float = 0.4) -> CheckResult:
    prob = _rwa_problem(theta, phi)
    e = np.eye(3, dtype=complex)
    _, dark = bright_dark_states(theta, phi, e[1], e[2])
    times = np.linspace(0.0, prob.duration, 41)
    states = propagate_vectors(prob.hamiltonian, dark, times)
    fid = min(abs(np.vdot(dark, s)) ** 2 for s in states)
    return CheckResult("dark-state invariance (rotating frame)", fid >= 1 - 1e-6, f"min fidelity {fid:.12f}")


def check_parallel_transport(theta: float = 0.7, phi: float = 0.4) -> CheckResult:
    prob = _rwa_problem(theta, phi)
    e = np.eye(3, dtype=complex)
    bright, dark = bright_dark_states(theta, phi, e[1], e[2])
    times = np.linspace(0.0, prob.duration, 41)
    H = prob.hamiltonian
    b_t = propagate_vectors(H, bright, times)
    d_t = propagate_vectors(H, dark, times)
    resid = max(abs(np.vdot(b, H(t) @ d)) for b, d, t in zip(b_t, d_t, times))
    limit = 1e-10 * prob.config.omega0
    return CheckResult("parallel transport <b|H|d> = 0", resid < limit, f"max residual {resid:.2e} (limit {limit:.2e})")


def check_target_identities(n: int = 100, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for g, th, ph in rng.uniform(-2 * np.pi, 2 * np.pi, size=(n, 3)):
        nx, ny, nz = rotation_axis(th, ph)
        ref = expm(-0.5j * g * (nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z))
        u = target_unitary_single(SingleQubitGateSpec(g, th, ph))
        worst = max(worst, np.abs(u - ref).max())
        u2 = target_unitary_two(TwoQubitGateSpec(g, th, ph))
        worst = max(worst, np.abs(u2[2:, 2:] - ref).max(), np.abs(u2[:2, :2] - np.eye(2)).max(),
                    np.abs(u2[:2, 2:]).max(), np.abs(u2[2:, :2]).max())
    return CheckResult("target matrix identities", worst < 1e-12, f"max entry deviation {worst:.1e}")


def check_noiseless_gates() -> CheckResult:
    parts, ok = [], True
    for name, spec in (("NOT", NOT), ("Hadamard", HADAMARD)):
        for dct in (True, False):
            cfg = single_qubit.SingleQubitConfig(dct=dct)
            res = single_qubit.run_single_qubit_gate(spec, cfg)
            f, pg = res.fidelity[-1], res.populations["p_G"][-1]
            ok &= f >= 0.995 and pg < 5e-3
            parts.append(f"{name}{'' if dct else '-SL'} F={f:.5f} pG={pg:.1e}")
    rep = two_qubit.cnot_report(two_qubit.build_problem(CNOT))
    ok &= rep.basis_average >= 0.99
    parts.append(f"CNOT F={rep.basis_average:.5f}")
    return CheckResult("noiseless compiled gates", bool(ok), ", ".join(parts))


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_target_identities,
    check_dark_state,
    check_parallel_transport,
    check_density_invariants,
    check_step_halving,
    check_noiseless_gates,
    check_fock_truncation,
)


def run_validation(checks=CHECKS) -> list[CheckResult]:
    out = []
    for check in checks:
        t0 = time.perf_counter()
        try:
            res = check()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(check.__name__, False, f"{type(exc).__name__}: {exc}")
        out.append(replace(res, seconds=time.perf_counter() - t0))
    return out
