"""Systematic-error injection, error and decoherence sweeps, and the bare-qubit NHQC baseline.

Z error: a static term delta * Omega0 / 2 * sigma_z on the transmon.
X error: the drive amplitude is miscalibrated by a factor (1 + epsilon), i.e. an
extra epsilon * f(t) on top of every drive term, which in the frame of the
static Hamiltonian is epsilon times the resonant coupling (epsilon Omega(t)
on the bright transition).
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .dynamics import (
    NoiseModel,
    TimeDependentHamiltonian,
    propagate_densities,
    propagate_vectors,
    rwa_hamiltonian,
    secular_components,
    secular_part,
)
from .gates_metrics import (
    HADAMARD,
    CNOT,
    LogicalChannel,
    SingleQubitGateSpec,
    TwoQubitGateSpec,
    average_gate_fidelity,
    fidelity_grid_states,
    target_unitary_single,
)
from .pulses import Envelope, PulseSegment, PulseSequence, single_loop_phase_table
from . import single_qubit, two_qubit

TWO_PI = 2 * np.pi
ERROR_GUARD = 0.5
SCHEMES = ("polariton-dct", "polariton-single-loop", "baseline-nhqc")


@dataclass(frozen=True)
class ErrorInjection:
    delta: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if abs(self.delta) > ERROR_GUARD or abs(self.epsilon) > ERROR_GUARD:
            raise ValueError(f"error fractions must satisfy |delta|, |epsilon| <= {ERROR_GUARD}")

    @property
    def is_zero(self) -> bool:
        return self.delta == 0 and self.epsilon == 0


def inject_errors(H: TimeDependentHamiltonian, delta: float, epsilon: float, omega0: float, sz: np.ndarray,
                  frame_energies: np.ndarray | None = None) -> TimeDependentHamiltonian:
    """Add delta * omega0/2 * sz and scale the drive by (1 + epsilon).

    ``frame_energies`` marks a rotating-frame Hamiltonian (interaction picture of
    diag(frame_energies)); the static error term is then reduced to its secular part.
    """
    ErrorInjection(delta, epsilon)
    out = H
    if delta != 0:
        term = 0.5 * delta * omega0 * np.asarray(sz, dtype=complex)
        if frame_energies is not None:
            term = secular_part(term, frame_energies)
        out = out.with_static(term)
    if epsilon != 0:
        out = out.scaled_drive(1.0 + epsilon)
    return out


def with_errors(problem: single_qubit.SingleQubitProblem, errors: ErrorInjection) -> single_qubit.SingleQubitProblem:
    if errors.is_zero:
        return problem
    H = inject_errors(problem.hamiltonian, errors.delta, errors.epsilon, problem.config.omega0, problem.sz,
                      None if problem.config.frame == "lab" else problem.energies)
    return replace(problem, hamiltonian=H)


# bare three-level baseline

@dataclass(frozen=True)
class BaselineModel:
    """Bare qubit {|0>, |1>} plus auxiliary |e>, both transitions driven resonantly.

    Only the resonant (rotating-wave) couplings are kept, so carrier values only
    label the two tones. Noise: gamma1 decays |1> -> |0> and |e> -> |1>,
    gamma2 dephases with sigma_z on the qubit levels; kappa is unused.
    """

    omega0: float = single_qubit.SingleQubitConfig().omega0
    envelope: str = "square"
    omega_01: float = TWO_PI * 5e9
    omega_1e: float = TWO_PI * 4.8e9

    @property
    def energies(self) -> np.ndarray:
        return np.array([0.0, self.omega_01, self.omega_01 + self.omega_1e])

    def sequence(self, spec: SingleQubitGateSpec) -> PulseSequence:
        e = self.energies
        segments = []
        for half_area, phi1, phi2 in single_loop_phase_table(spec.gamma, spec.phi):
            env = Envelope.for_half_area(self.envelope, self.omega0, half_area)
            # |e> lies above the qubit levels (|G> lies below |1,+->), so the same
            # gate needs the conjugate tone phases
            segments.append(PulseSegment(env, spec.theta, -phi1, -phi2, e[2] - e[0], e[2] - e[1], half_area))
        return PulseSequence(tuple(segments))

    def control(self) -> np.ndarray:
        # same sign structure as sqrt(2) sigma_x between |G> and |1,-+>
        v = np.zeros((3, 3), dtype=complex)
        v[2, 0], v[2, 1] = -1.0, 1.0
        return v + v.conj().T

    def sz(self) -> np.ndarray:
        return np.diag([-1.0, 1.0, 0.0]).astype(complex)


def baseline_channel(spec: SingleQubitGateSpec, errors: ErrorInjection = ErrorInjection(),
                     noise: NoiseModel | None = None, model: BaselineModel = BaselineModel()) -> LogicalChannel:
    seq = model.sequence(spec)
    e = model.energies
    H = rwa_hamiltonian(e, model.control(), seq)
    H = inject_errors(H, errors.delta, errors.epsilon, model.omega0, model.sz(), frame_energies=e)
    times = np.array([0.0, seq.duration])
    noise = noise or NoiseModel()
    if noise.is_noiseless:
        final = propagate_vectors(H, np.eye(3, dtype=complex)[:, :2], times)[-1]
        amps = final[:2]
        return LogicalChannel(np.einsum("ki,lj->ijkl", amps, amps.conj()))
    lower = np.zeros((3, 3), dtype=complex)
    lower[0, 1] = lower[1, 2] = 1.0
    dissipators = []
    for rate, op in ((noise.gamma1, lower), (noise.gamma2, model.sz())):
        if rate > 0:
            dissipators.extend((rate, part) for part in secular_components(op, e))
    units = np.zeros((4, 3, 3), dtype=complex)
    for n, (i, j) in enumerate(np.ndindex(2, 2)):
        units[n, i, j] = 1.0
    final = propagate_densities(H, units, dissipators, times)[-1]
    return LogicalChannel(final[:, :2, :2].reshape(2, 2, 2, 2))


def baseline_nhqc_gate(spec: SingleQubitGateSpec, delta: float = 0.0, epsilon: float = 0.0,
                       noise: NoiseModel | None = None, model: BaselineModel = BaselineModel(),
                       n_theta: int = 201, n_phi: int = 11) -> float:
    """Grid-average fidelity of the two-segment single-loop gate on the bare three-level system."""
    ch = baseline_channel(spec, ErrorInjection(delta, epsilon), noise, model)
    return average_gate_fidelity(ch, target_unitary_single(spec), fidelity_grid_states(n_theta, n_phi))


# sweeps

@dataclass(frozen=True)
class SweepResult:
    axis: str
    fractions: np.ndarray
    fidelities: dict[str, np.ndarray] = field(default_factory=dict)

    def column(self, scheme: str) -> np.ndarray:
        return self.fidelities[scheme]


@dataclass(frozen=True)
class _SweepPoint:
    scheme: str
    errors: ErrorInjection
    spec: SingleQubitGateSpec
    config: single_qubit.SingleQubitConfig
    noise: NoiseModel
    n_theta: int
    n_phi: int


def _evaluate(point: _SweepPoint) -> float:
    target = target_unitary_single(point.spec)
    states = fidelity_grid_states(point.n_theta, point.n_phi)
    if point.scheme == "baseline-nhqc":
        model = BaselineModel(omega0=point.config.omega0, envelope=point.config.envelope)
        ch = baseline_channel(point.spec, point.errors, point.noise, model)
    else:
        cfg = replace(point.config, dct=point.scheme == "polariton-dct")
        problem = single_qubit.build_problem(point.spec, cfg, point.noise)
        ch = with_errors(problem, point.errors).channel()
    return average_gate_fidelity(ch, target, states)


def _map(fn: Callable, items: Sequence, executor: Executor | None) -> list:
    if executor is None:
        return [fn(x) for x in items]
    return list(executor.map(fn, items))


def default_fractions(lo: float = -0.1, hi: float = 0.1, points: int = 21) -> np.ndarray:
    if points < 2:
        raise ValueError("a sweep needs at least two points")
    return np.linspace(lo, hi, points)


def sweep_error(axis: str, fractions: Iterable[float], schemes: Sequence[str] = SCHEMES,
                spec: SingleQubitGateSpec = HADAMARD, noise: NoiseModel | None = None,
                config: single_qubit.SingleQubitConfig | None = None, executor: Executor | None = None,
                n_theta: int = 201, n_phi: int = 11) -> SweepResult:
    """Average gate fidelity per scheme against a Z (``axis='z'``) or X (``axis='x'``) error fraction."""
    if axis not in ("z", "x"):
        raise ValueError("axis must be 'z' or 'x'")
    unknown = set(schemes) - set(SCHEMES)
    if unknown:
        raise ValueError(f"unknown schemes {sorted(unknown)}; choose from {SCHEMES}")
    fractions = np.asarray(list(fractions), dtype=float)
    config = config or single_qubit.SingleQubitConfig()
    noise = noise or NoiseModel()
    points = [
        _SweepPoint(s, ErrorInjection(delta=f) if axis == "z" else ErrorInjection(epsilon=f),
                    spec, config, noise, n_theta, n_phi)
        for s in schemes for f in fractions
    ]
    values = np.array(_map(_evaluate, points, executor)).reshape(len(schemes), len(fractions))
    return SweepResult(axis, fractions, {s: values[k] for k, s in enumerate(schemes)})


@dataclass(frozen=True)
class _DecoherencePoint:
    gamma: float
    kappa: float
    spec: TwoQubitGateSpec
    config: two_qubit.TwoQubitConfig
    metric: str


def _evaluate_cnot(point: _DecoherencePoint) -> float:
    noise = NoiseModel(kappa=point.kappa, gamma1=point.gamma, gamma2=point.gamma)
    report = two_qubit.cnot_report(two_qubit.build_problem(point.spec, point.config, noise))
    return getattr(report, point.metric)


def sweep_decoherence(gamma_values: Iterable[float], spec: TwoQubitGateSpec = CNOT,
                      config: two_qubit.TwoQubitConfig | None = None, kappa: float = TWO_PI * 0.1e3,
                      metric: str = "basis_average", executor: Executor | None = None) -> SweepResult:
    """Two-qubit gate fidelity against the transmon rate Gamma (= gamma1 = gamma2), kappa fixed."""
    gammas = np.asarray(list(gamma_values), dtype=float)
    if np.any(gammas < 0):
        raise ValueError("decoherence rates must be non-negative")
    config = config or two_qubit.TwoQubitConfig()
    points = [_DecoherencePoint(float(g), kappa, spec, config, metric) for g in gammas]
    values = np.array(_map(_evaluate_cnot, points, executor))
    return SweepResult("gamma", gammas, {"cnot": values})
