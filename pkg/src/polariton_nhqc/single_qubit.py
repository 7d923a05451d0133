"""Single polariton qubit: assemble the driven JC problem and run holonomic gates.

Everything is expressed in the dressed eigenbasis of the JC Hamiltonian with the
ground energy shifted to zero, so the static Hamiltonian is diagonal. Two drive
models are available:

* ``"polariton"`` (default) keeps {|G>, |1,->, |1,+>}. The drive sqrt(2) f(t) sigma_x
  is compressed onto that span, and the span is exactly invariant under the
  static part and all collapse operators, so the 3-level run is exact for the
  compressed drive.
* ``"full"`` keeps the whole truncated JC space, so the drive also climbs the
  ladder (|1,+-> <-> |2,+->) off resonance.

Frames: ``"lab"`` integrates the full time-dependent drive without any
rotating-wave approximation; ``"rotating"`` integrates the resonant part only,
in the interaction picture of the static Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import (
    DEFAULT_STEPS_PER_PERIOD,
    NoiseModel,
    SimResult,
    TimeDependentHamiltonian,
    lab_frame_hamiltonian,
    propagate_densities,
    propagate_vectors,
    rwa_hamiltonian,
    secular_components,
)
from .gates_metrics import (
    LogicalChannel,
    SingleQubitGateSpec,
    average_gate_fidelity,
    fidelity_grid_states,
    state_fidelity,
    target_unitary_single,
)
from .jc_model import JcParams, dressed_spectrum, jc_operators, transition_frequencies
from .pulses import PulseSequence, compile_single_loop, compile_single_qubit_dct

TWO_PI = 2 * np.pi
DRIVE_MODELS = ("polariton", "full")
FRAMES = ("lab", "rotating")

REFERENCE_NOISE = NoiseModel(kappa=TWO_PI * 0.1e3, gamma1=TWO_PI * 4e3, gamma2=TWO_PI * 4e3)


def _default_params() -> JcParams:
    return JcParams.resonant(TWO_PI * 8e9, g_ratio=1 / 20, n_fock=5)


@dataclass(frozen=True)
class SingleQubitConfig:
    params: JcParams = field(default_factory=_default_params)
    omega0_over_g: float = 1 / 20
    envelope: str = "square"
    dct: bool = True
    drive_model: str = "polariton"
    frame: str = "lab"
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD
    n_samples: int = 201

    def __post_init__(self):
        if self.drive_model not in DRIVE_MODELS:
            raise ValueError(f"drive_model must be one of {DRIVE_MODELS}")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")
        if self.omega0_over_g <= 0:
            raise ValueError("omega0_over_g must be positive")
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")

    @property
    def omega0(self) -> float:
        return self.omega0_over_g * self.params.g


@dataclass(frozen=True, eq=False)
class SingleQubitProblem:
    """A compiled gate on one polariton qubit, ready to integrate.

    Simulation-space index 0 is |G>, 1 is |1,->, 2 is |1,+>; further indices
    (full drive model only) follow ``PolaritonBasis.eigenvectors``.
    """

    config: SingleQubitConfig
    spec: SingleQubitGateSpec
    sequence: PulseSequence
    hamiltonian: TimeDependentHamiltonian
    energies: np.ndarray
    collapse: dict[str, np.ndarray]
    sz: np.ndarray
    noise: NoiseModel = NoiseModel()

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def duration(self) -> float:
        return self.sequence.duration

    @property
    def target(self) -> np.ndarray:
        return target_unitary_single(self.spec)

    @property
    def frame_energies(self) -> np.ndarray | None:
        """Energies defining the logical frame for lab-frame runs, None in the rotating frame."""
        return self.energies if self.config.frame == "lab" else None

    def with_noise(self, noise: NoiseModel) -> "SingleQubitProblem":
        return replace(self, noise=noise)

    def dissipators(self) -> list[tuple[float, np.ndarray]]:
        n = self.noise
        pairs = [(n.kappa, self.collapse["a"]), (n.gamma1, self.collapse["sm"]), (n.gamma2, self.collapse["sz"])]
        out = []
        for rate, op in pairs:
            if rate <= 0:
                continue
            if self.config.frame == "rotating":
                out.extend((rate, part) for part in secular_components(op, self.energies))
            else:
                out.append((rate, op))
        return out

    def embed_logical(self, coeffs) -> np.ndarray:
        """Simulation-space vector c_- |-> + c_+ |+>."""
        c = np.asarray(coeffs, dtype=complex)
        psi = np.zeros(self.dim, dtype=complex)
        psi[1:3] = c
        return psi

    def _logical_amplitudes(self, states: np.ndarray, t: float) -> np.ndarray:
        """Rows (|->, |+>) of the state array, taken into the logical frame at time t."""
        amps = states[1:3]
        if self.frame_energies is not None:
            phase = np.exp(1j * self.energies[1:3] * t)
            amps = amps * phase.reshape((2,) + (1,) * (amps.ndim - 1))
        return amps

    def _logical_density(self, rho: np.ndarray, t: float) -> np.ndarray:
        block = rho[..., 1:3, 1:3]
        if self.frame_energies is not None:
            ph = np.exp(1j * self.energies[1:3] * t)
            block = block * np.outer(ph, ph.conj())
        return block

    def run(self, psi0_logical=(0.0, 1.0), n_samples: int | None = None) -> SimResult:
        """Evolve a logical initial state and record populations and fidelity to the target.

        The trace fidelity at every time is <U psi0| rho_L(t) |U psi0> with
        rho_L the unnormalized logical block, so the final value is the gate's
        state fidelity for this input.
        """
        psi0_logical = np.asarray(psi0_logical, dtype=complex)
        psi0_logical = psi0_logical / np.linalg.norm(psi0_logical)
        psi0 = self.embed_logical(psi0_logical)
        times = np.linspace(0.0, self.duration, n_samples or self.config.n_samples)
        spp = self.config.steps_per_period
        goal = self.target @ psi0_logical

        if self.noise.is_noiseless:
            states = propagate_vectors(self.hamiltonian, psi0, times, steps_per_period=spp)
            pops = np.abs(states) ** 2
            logical = np.array([np.outer(a, a.conj()) for a in
                                (self._logical_amplitudes(s, t) for s, t in zip(states, times))])
            drift = float(abs(np.linalg.norm(states[-1]) - 1))
        else:
            rho0 = np.outer(psi0, psi0.conj())
            states = propagate_densities(self.hamiltonian, rho0, self.dissipators(), times, steps_per_period=spp)
            pops = np.real(np.diagonal(states, axis1=1, axis2=2))
            logical = np.array([self._logical_density(r, t) for r, t in zip(states, times)])
            drift = float(np.max(np.abs(np.real(np.trace(states, axis1=1, axis2=2)) - 1)))

        p_minus, p_plus = pops[:, 1], pops[:, 2]
        fidelity = np.array([state_fidelity(r, goal) for r in logical])
        return SimResult(
            times=times,
            states=states,
            drift=drift,
            populations={"p_G": pops[:, 0], "p_minus": p_minus, "p_plus": p_plus},
            logical=logical,
            leakage=1.0 - p_minus - p_plus,
            fidelity=fidelity,
        )

    def channel(self) -> LogicalChannel:
        """Final-time logical channel, reconstructed from the evolution of |i><j|."""
        times = np.array([0.0, self.duration])
        spp = self.config.steps_per_period
        T = self.duration
        if self.noise.is_noiseless:
            cols = np.stack([self.embed_logical([1, 0]), self.embed_logical([0, 1])], axis=1)
            final = propagate_vectors(self.hamiltonian, cols, times, steps_per_period=spp)[-1]
            amps = self._logical_amplitudes(final, T)
            outputs = np.einsum("ki,lj->ijkl", amps, amps.conj())
        else:
            units = np.zeros((4, self.dim, self.dim), dtype=complex)
            for n, (i, j) in enumerate(np.ndindex(2, 2)):
                units[n, 1 + i, 1 + j] = 1.0
            final = propagate_densities(self.hamiltonian, units, self.dissipators(), times, steps_per_period=spp)[-1]
            outputs = self._logical_density(final, T).reshape(2, 2, 2, 2)
        return LogicalChannel(outputs)

    def average_fidelity(self, n_theta: int = 201, n_phi: int = 11) -> float:
        """Mean state fidelity over the cos(t)|-> + sin(t) e^{ip}|+> grid."""
        return average_gate_fidelity(self.channel(), self.target, fidelity_grid_states(n_theta, n_phi))


def compile_sequence(config: SingleQubitConfig, spec: SingleQubitGateSpec) -> PulseSequence:
    basis = dressed_spectrum(config.params)
    w = transition_frequencies(basis)
    compile_fn = compile_single_qubit_dct if config.dct else compile_single_loop
    return compile_fn(spec.gamma, spec.theta, spec.phi, config.envelope, config.omega0,
                      w.minus, w.plus, coupling=config.params.g)


def build_problem(spec: SingleQubitGateSpec, config: SingleQubitConfig | None = None,
                  noise: NoiseModel | None = None) -> SingleQubitProblem:
    config = config or SingleQubitConfig()
    params = config.params
    basis = dressed_spectrum(params)
    vecs = basis.eigenvectors()
    energies = basis.eigenvalues() - basis.ground_energy
    if config.drive_model == "polariton":
        vecs, energies = vecs[:, :3], energies[:3]
    ops = jc_operators(params)

    def compress(m):
        return vecs.conj().T @ m @ vecs

    control = np.sqrt(2) * compress(ops["sx"].matrix)
    sequence = compile_sequence(config, spec)
    static = np.diag(energies).astype(complex)
    if config.frame == "lab":
        H = lab_frame_hamiltonian(static, control, sequence)
    else:
        H = rwa_hamiltonian(energies, control, sequence)
    collapse = {k: compress(ops[k].matrix) for k in ("a", "sm", "sz")}
    return SingleQubitProblem(
        config=config,
        spec=spec,
        sequence=sequence,
        hamiltonian=H,
        energies=energies,
        collapse=collapse,
        sz=collapse["sz"],
        noise=noise or NoiseModel(),
    )


def run_single_qubit_gate(spec: SingleQubitGateSpec, config: SingleQubitConfig | None = None,
                          noise: NoiseModel | None = None, psi0_logical=(0.0, 1.0)) -> SimResult:
    """Evolve one logical input through the compiled gate (default input |+>)."""
    return build_problem(spec, config, noise).run(psi0_logical)
