"""Holonomic gate targets, bright/dark states, logical projection and fidelities."""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class SingleQubitGateSpec:
    gamma: float
    theta: float
    phi: float

    @classmethod
    def from_pi_units(cls, gamma_pi: float, theta_pi: float, phi_pi: float) -> "SingleQubitGateSpec":
        return cls(gamma_pi * np.pi, theta_pi * np.pi, phi_pi * np.pi)


NOT = SingleQubitGateSpec(np.pi, np.pi / 2, 0.0)
HADAMARD = SingleQubitGateSpec(np.pi, np.pi / 4, 0.0)


@dataclass(frozen=True)
class TwoQubitGateSpec:
    alpha: float
    vartheta: float
    phi: float

    @classmethod
    def from_pi_units(cls, alpha_pi: float, vartheta_pi: float, phi_pi: float) -> "TwoQubitGateSpec":
        return cls(alpha_pi * np.pi, vartheta_pi * np.pi, phi_pi * np.pi)


CNOT = TwoQubitGateSpec(np.pi, np.pi / 2, 0.0)


def _rotation(angle: float, theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array(
        [
            [c - 1j * s * np.cos(theta), -1j * s * np.sin(theta) * np.exp(1j * phi)],
            [-1j * s * np.sin(theta) * np.exp(-1j * phi), c + 1j * s * np.cos(theta)],
        ]
    )


def target_unitary_single(spec: SingleQubitGateSpec) -> np.ndarray:
    """Holonomic single-qubit gate on the ordered logical basis (|->, |+>)."""
    return _rotation(spec.gamma, spec.theta, spec.phi)


def rotation_axis(theta: float, phi: float) -> np.ndarray:
    """Axis n such that target_unitary_single == exp(-i gamma/2 n.sigma).

    The off-diagonal entries carry e^{+i phi} above the diagonal, so the y
    component enters with the opposite sign to the textbook Bloch axis.
    """
    return np.array([np.sin(theta) * np.cos(phi), -np.sin(theta) * np.sin(phi), np.cos(theta)])


def target_unitary_two(spec: TwoQubitGateSpec) -> np.ndarray:
    """Controlled holonomic rotation on (|++>, |+->, |-+>, |-->)."""
    u = np.eye(4, dtype=complex)
    u[2:, 2:] = _rotation(spec.alpha, spec.vartheta, spec.phi)
    return u


def realized_unitary_two(spec: TwoQubitGateSpec) -> np.ndarray:
    """Gate produced by the cyclic two-segment evolution.

    The geometric phase leaves the rotated block with an extra e^{-i alpha/2}
    relative to the spectator block, i.e. target_unitary_two up to a local
    phase gate on the left qubit (a -i on the block for CNOT).
    """
    u = target_unitary_two(spec)
    u[2:, 2:] *= np.exp(-0.5j * spec.alpha)
    return u


def bright_dark_states(theta: float, phi: float, minus: np.ndarray, plus: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """|b> = cos(theta/2)|+> - sin(theta/2) e^{i phi}|->,  |d> = sin(theta/2) e^{-i phi}|+> + cos(theta/2)|->."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    bright = c * plus - s * np.exp(1j * phi) * minus
    dark = s * np.exp(-1j * phi) * plus + c * minus
    return bright, dark


def _check_orthonormal(basis: np.ndarray, tol: float = 1e-10) -> None:
    gram = basis.conj() @ basis.T
    if np.linalg.norm(gram - np.eye(len(basis))) > tol:
        raise ValueError("logical basis is not orthonormal")


def project_logical(state: np.ndarray, basis: Sequence[np.ndarray], energies: Sequence[float] | None = None,
                    t: float = 0.0) -> tuple[np.ndarray, float]:
    """Unnormalized logical density matrix P rho P and leakage 1 - tr(P rho P).

    With ``energies`` the basis vectors are taken in the frame rotating with
    them, |k> e^{-i E_k t}, which is how lab-frame states are compared with
    interaction-picture targets.
    """
    b = np.array(basis, dtype=complex)
    _check_orthonormal(b)
    if energies is not None:
        b = b * np.exp(-1j * np.asarray(energies, dtype=float) * t)[:, None]
    state = np.asarray(state)
    if state.ndim == 1:
        amps = b.conj() @ state
        rho_l = np.outer(amps, amps.conj())
        total = float(np.vdot(state, state).real)
    else:
        rho_l = b.conj() @ state @ b.T
        total = float(np.trace(state).real)
    return rho_l, total - float(np.trace(rho_l).real)


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi|rho|psi>; rho may be a state vector."""
    rho, psi = np.asarray(rho), np.asarray(psi)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if rho.shape != (len(psi), len(psi)):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, psi {psi.shape}")
    return float(np.real(np.vdot(psi, rho @ psi)))


def fidelity_grid_states(n_theta: int = 201, n_phi: int = 11) -> np.ndarray:
    """cos(t)|-> + sin(t) e^{i p}|+> with t evenly on [0, pi] and p evenly on [0, 2pi)."""
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    return np.stack([np.cos(tt).ravel(), (np.sin(tt) * np.exp(1j * pp)).ravel()], axis=1)


def average_gate_fidelity(runner: Callable[[np.ndarray], np.ndarray], target: np.ndarray,
                          states: np.ndarray | None = None, executor: Executor | None = None) -> float:
    """Mean of <U psi|rho_out|U psi> over the initial-state grid.

    ``runner`` maps an initial logical state vector to the final logical density
    matrix. Grid points are independent and may be evaluated by ``executor``;
    results are reduced in grid order, so the value is scheduling independent.
    """
    states = fidelity_grid_states() if states is None else np.asarray(states)
    if executor is None:
        outputs = [runner(psi) for psi in states]
    else:
        outputs = list(executor.map(runner, states))
    fids = [state_fidelity(rho, target @ psi) for rho, psi in zip(outputs, states)]
    return float(np.mean(fids))


class LogicalChannel:
    """Linear map on logical density matrices reconstructed from propagated matrix units.

    ``outputs[i, j]`` is the final logical block obtained from the initial
    operator |i><j|. Calling the channel on a state vector or density matrix
    returns the (unnormalized) final logical density matrix, so it can be used
    directly as an ``average_gate_fidelity`` runner.
    """

    def __init__(self, outputs: np.ndarray):
        self.outputs = np.asarray(outputs)
        self.dim = self.outputs.shape[0]

    def __call__(self, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state)
        rho = np.outer(state, state.conj()) if state.ndim == 1 else state
        return np.einsum("ij,ijkl->kl", rho, self.outputs)

    def process_fidelity(self, target: np.ndarray) -> float:
        """Entanglement fidelity <<U|E|U>> / d^2 of the channel against a unitary."""
        d = self.dim
        total = 0.0 + 0.0j
        for i in range(d):
            for j in range(d):
                total += np.vdot(target[:, i], self.outputs[i, j] @ target[:, j])
        return float(total.real) / d**2

    def haar_average_fidelity(self, target: np.ndarray) -> float:
        """Average fidelity over Haar-random inputs: (d F_pro + tr-preserved part) / (d + 1).

        Uses the general form F_avg = (d F_pro + <trace of output>) / (d + 1) so
        leakage (trace loss) lowers the value.
        """
        d = self.dim
        mean_trace = np.mean([np.trace(self.outputs[i, i]).real for i in range(d)])
        return (d * self.process_fidelity(target) + mean_trace) / (d + 1)
