"""Two polariton qubits coupled through their cavities, and the holonomic controlled gate.

H(t) = H_l + H_r + J(t) (a_l a_r^dag + a_l^dag a_r) conserves the total number of
excitations, and every collapse operator lowers or preserves it. Starting from
the logical subspace (two excitations) the dynamics therefore never leaves the
sector with at most two excitations, and the simulation is carried out exactly
in that 13-dimensional sector, written in the dressed product basis
|x>_l (x) |y>_r with x, y drawn from {G, |1,+->, |2,+->}.

The gate uses the ancilla |2-,G> = |2,->_l (x) |G>_r. Tone 1 of J(t) sits on
omega'_- = E(2-,G) - E(--) and tone 2 on omega'_+ = E(2-,G) - E(-+).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .dynamics import (
    DEFAULT_STEPS_PER_PERIOD,
    NoiseModel,
    SimResult,
    TimeDependentHamiltonian,
    lab_frame_hamiltonian,
    propagate_densities,
    propagate_vectors,
    restrict_open_system,
    rwa_hamiltonian,
    secular_components,
    spectral_range,
)
from .gates_metrics import (
    LogicalChannel,
    TwoQubitGateSpec,
    average_gate_fidelity,
    realized_unitary_two,
    state_fidelity,
)
from .hilbert import HilbertSpace, embed, fock_annihilation, sigma_minus, sigma_z
from .jc_model import JcParams, PolaritonBasis, build_jc_hamiltonian, dressed_spectrum
from .pulses import PulseSequence, compile_two_qubit, two_qubit_amplitudes

TWO_PI = 2 * np.pi
LOGICAL_LABELS = ("pp", "pm", "mp", "mm")
FRAMES = ("lab", "rotating")


def _default_pair(omega_q: float, n_fock: int) -> JcParams:
    return JcParams(omega_q=omega_q, omega_c=omega_q, g=omega_q / 20, n_fock=n_fock)


@dataclass(frozen=True)
class CoupledParams:
    left: JcParams = field(default_factory=lambda: _default_pair(TWO_PI * 7.8e9, 5))
    right: JcParams = field(default_factory=lambda: _default_pair(TWO_PI * 4.7e9, 5))
    j1: float = TWO_PI * 5e6
    j2: float = TWO_PI * 5e6

    def __post_init__(self):
        if self.j1 <= 0 or self.j2 <= 0:
            raise ValueError("modulation amplitudes j1, j2 must be positive")
        if self.left.n_fock != self.right.n_fock:
            raise ValueError("left and right pairs must share the Fock truncation")

    @property
    def n_fock(self) -> int:
        return self.left.n_fock

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace((2, self.left.n_fock, 2, self.right.n_fock))

    @property
    def coupling_peak(self) -> float:
        """J_c = sqrt(j1^2 + j2^2)."""
        return two_qubit_amplitudes(self.j1, self.j2)[0]

    @classmethod
    def reference(cls, n_fock: int = 5) -> "CoupledParams":
        return cls(_default_pair(TWO_PI * 7.8e9, n_fock), _default_pair(TWO_PI * 4.7e9, n_fock))


@dataclass(frozen=True)
class TwoQubitConfig:
    params: CoupledParams = field(default_factory=CoupledParams)
    envelope: str = "square"
    frame: str = "lab"
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD
    n_samples: int = 201

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")


def _full_operators(params: CoupledParams) -> dict[str, np.ndarray]:
    space = params.space
    nf = params.n_fock
    a = fock_annihilation(nf)
    ops = {
        "a_l": embed(a, 1, space),
        "a_r": embed(a, 3, space),
        "sm_l": embed(sigma_minus(), 0, space),
        "sm_r": embed(sigma_minus(), 2, space),
        "sz_l": embed(sigma_z(), 0, space),
        "sz_r": embed(sigma_z(), 2, space),
    }
    return {k: v.matrix for k, v in ops.items()}


def build_coupled_hamiltonian(params: CoupledParams, sequence: PulseSequence | None = None) -> TimeDependentHamiltonian:
    """Lab-frame H(t) on the full transmon(x)cavity(x)transmon(x)cavity space.

    J(t) = sqrt(2) f(t) with f the two-tone drive of ``sequence``; without a
    sequence the pairs are uncoupled.
    """
    hl = build_jc_hamiltonian(params.left).matrix
    hr = build_jc_hamiltonian(params.right).matrix
    static = np.kron(hl, np.eye(hr.shape[0])) + np.kron(np.eye(hl.shape[0]), hr)
    if sequence is None:
        return TimeDependentHamiltonian(static)
    ops = _full_operators(params)
    hop = ops["a_l"] @ ops["a_r"].conj().T
    return lab_frame_hamiltonian(static, np.sqrt(2) * (hop + hop.conj().T), sequence)


def excitation_number(params: CoupledParams) -> np.ndarray:
    """Diagonal of the total excitation operator on the full space."""
    labels = params.space.labels()
    return labels.sum(axis=1)


@dataclass(frozen=True, eq=False)
class DressedSector:
    """Dressed product basis of the sector with at most two excitations."""

    labels: tuple[tuple[str, str], ...]
    vectors: np.ndarray          # columns, full-space vectors
    energies: np.ndarray         # uncoupled energies, ground shifted to 0
    left: PolaritonBasis
    right: PolaritonBasis

    def index(self, left_label: str, right_label: str) -> int:
        return self.labels.index((left_label, right_label))


def _pair_states(basis: PolaritonBasis) -> dict[str, tuple[np.ndarray, float, int]]:
    out = {"G": (basis.ground, basis.ground_energy, 0)}
    for n in (1, 2):
        for name, vec, e in zip(("-", "+"), basis.dressed[n], basis.energies[n]):
            out[f"{n}{name}"] = (vec, e, n)
    return out


def dressed_sector(params: CoupledParams) -> DressedSector:
    if params.n_fock < 3:
        raise ValueError("two-qubit gate needs n_fock >= 3")
    bl, br = dressed_spectrum(params.left), dressed_spectrum(params.right)
    sl, sr = _pair_states(bl), _pair_states(br)
    labels, cols, energies = [], [], []
    for kl, (vl, el, nl) in sl.items():
        for kr, (vr, er, nr) in sr.items():
            if nl + nr <= 2:
                labels.append((kl, kr))
                cols.append(np.kron(vl, vr))
                energies.append(el + er)
    e = np.array(energies)
    return DressedSector(tuple(labels), np.column_stack(cols), e - (bl.ground_energy + br.ground_energy), bl, br)


_LOGICAL_KEYS = {"pp": ("1+", "1+"), "pm": ("1+", "1-"), "mp": ("1-", "1+"), "mm": ("1-", "1-")}
ANCILLA = ("2-", "G")


class DoubleExcitationFrequencies(NamedTuple):
    minus: float   # E(2-,G) - E(--)
    plus: float    # E(2-,G) - E(-+)


def double_excitation_frequencies(params: CoupledParams) -> DoubleExcitationFrequencies:
    """omega'_+- = E(2-,G) - E(-+-) from the uncoupled dressed spectrum.

    Warns when another transition driven by a_l a_r^dag + h.c. lies within
    10 J_c of either tone, since the RWA then no longer suppresses it.
    """
    sec = dressed_sector(params)
    e = sec.energies
    anc = e[sec.index(*ANCILLA)]
    w = DoubleExcitationFrequencies(anc - e[sec.index("1-", "1-")], anc - e[sec.index("1-", "1+")])

    ops = _full_operators(params)
    hop = ops["a_l"] @ ops["a_r"].conj().T
    c = sec.vectors.conj().T @ (hop + hop.conj().T) @ sec.vectors
    jc = params.coupling_peak
    wanted = {(sec.index(*ANCILLA), sec.index("1-", "1-")), (sec.index(*ANCILLA), sec.index("1-", "1+"))}
    for i, j in zip(*np.nonzero(np.abs(c) > 1e-12)):
        gap = e[i] - e[j]
        if gap <= 0 or (i, j) in wanted:
            continue
        nearest = min(abs(gap - w.minus), abs(gap - w.plus))
        if nearest < 10 * jc:
            warnings.warn(
                f"transition {sec.labels[j]} -> {sec.labels[i]} is {nearest / TWO_PI:.3e} Hz from a drive tone "
                f"(< 10 J_c); the rotating-wave approximation is questionable",
                stacklevel=2,
            )
    return w


def ancilla_matrix_elements(params: CoupledParams) -> tuple[complex, complex]:
    """<--|a_l a_r^dag|2-,G> and <-+|a_l a_r^dag|2-,G>."""
    sec = dressed_sector(params)
    ops = _full_operators(params)
    hop = ops["a_l"] @ ops["a_r"].conj().T
    v = sec.vectors
    anc = v[:, sec.index(*ANCILLA)]
    return (complex(np.vdot(v[:, sec.index("1-", "1-")], hop @ anc)),
            complex(np.vdot(v[:, sec.index("1-", "1+")], hop @ anc)))


@dataclass(frozen=True, eq=False)
class TwoQubitProblem:
    config: TwoQubitConfig
    spec: TwoQubitGateSpec
    sector: DressedSector
    sequence: PulseSequence
    hamiltonian: TimeDependentHamiltonian
    collapse: dict[str, np.ndarray]
    noise: NoiseModel = NoiseModel()

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def duration(self) -> float:
        return self.sequence.duration

    @property
    def target(self) -> np.ndarray:
        return realized_unitary_two(self.spec)

    @property
    def logical_indices(self) -> list[int]:
        return [self.sector.index(*_LOGICAL_KEYS[k]) for k in LOGICAL_LABELS]

    def with_noise(self, noise: NoiseModel) -> "TwoQubitProblem":
        return replace(self, noise=noise)

    def dissipators(self) -> list[tuple[float, np.ndarray]]:
        n = self.noise
        out = []
        for side in ("l", "r"):
            for rate, key in ((n.kappa, "a"), (n.gamma1, "sm"), (n.gamma2, "sz")):
                if rate <= 0:
                    continue
                op = self.collapse[f"{key}_{side}"]
                if self.config.frame == "rotating":
                    out.extend((rate, part) for part in secular_components(op, self.sector.energies))
                else:
                    out.append((rate, op))
        return out

    def embed_logical(self, coeffs) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.logical_indices] = np.asarray(coeffs, dtype=complex)
        return psi

    def _phases(self, t: float) -> np.ndarray:
        if self.config.frame == "rotating":
            return np.ones(4, dtype=complex)
        return np.exp(1j * self.sector.energies[self.logical_indices] * t)

    def run(self, psi0_logical=(0.0, 0.0, 0.0, 1.0), n_samples: int | None = None) -> SimResult:
        """Evolve a logical input on (|++>, |+->, |-+>, |-->) and trace populations and fidelity."""
        psi0_logical = np.asarray(psi0_logical, dtype=complex)
        psi0_logical = psi0_logical / np.linalg.norm(psi0_logical)
        psi0 = self.embed_logical(psi0_logical)
        times = np.linspace(0.0, self.duration, n_samples or self.config.n_samples)
        spp = self.config.steps_per_period
        idx = self.logical_indices
        goal = self.target @ psi0_logical

        if self.noise.is_noiseless:
            states = propagate_vectors(self.hamiltonian, psi0, times, steps_per_period=spp)
            pops = np.abs(states) ** 2
            logical = []
            for s, t in zip(states, times):
                amps = s[idx] * self._phases(t)
                logical.append(np.outer(amps, amps.conj()))
            drift = float(abs(np.linalg.norm(states[-1]) - 1))
        else:
            rho0 = np.outer(psi0, psi0.conj())
            states = propagate_densities(self.hamiltonian, rho0, self.dissipators(), times, steps_per_period=spp)
            pops = np.real(np.diagonal(states, axis1=1, axis2=2))
            logical = []
            for r, t in zip(states, times):
                ph = self._phases(t)
                logical.append(r[np.ix_(idx, idx)] * np.outer(ph, ph.conj()))
            drift = float(np.max(np.abs(np.real(np.trace(states, axis1=1, axis2=2)) - 1)))
        logical = np.array(logical)

        named = {f"p_{k}": pops[:, i] for k, i in zip(LOGICAL_LABELS, idx)}
        populations = {
            "p_G": pops[:, self.sector.index("G", "G")],
            "p_minus": named["p_mp"] + named["p_mm"],
            "p_plus": named["p_pp"] + named["p_pm"],
            **named,
            "p_ancilla": pops[:, self.sector.index(*ANCILLA)],
        }
        leakage = 1.0 - sum(named.values())
        fidelity = np.array([state_fidelity(r, goal) for r in logical])
        return SimResult(times, states, drift, populations, logical, leakage, fidelity)

    @property
    def two_excitation_indices(self) -> list[int]:
        """Sector indices with two excitations; the logical states and the ancilla live here."""
        return [i for i, (l, r) in enumerate(self.sector.labels) if _excitations(l) + _excitations(r) == 2]

    def block_generator(self) -> tuple[TimeDependentHamiltonian, list[tuple[float, np.ndarray]]]:
        """Exact reduced dynamics of the two-excitation block.

        Decay only lowers the excitation number, so population that leaves the
        block never returns and the block evolves on its own (with trace loss).
        """
        idx = self.two_excitation_indices
        H = self.hamiltonian
        if self.config.frame == "lab":
            e = self.sector.energies[idx]
            mf = max(self.sequence.max_carrier, spectral_range(np.diag(e)))
        else:
            mf = H.max_frequency
        return restrict_open_system(H, self.dissipators(), idx, max_frequency=mf)

    def channel(self) -> LogicalChannel:
        """Final logical channel from the propagated |i><j| of the two-excitation block."""
        times = np.array([0.0, self.duration])
        spp = self.config.steps_per_period
        block = self.two_excitation_indices
        idx = [block.index(i) for i in self.logical_indices]
        ph = self._phases(self.duration)
        Hb, dissipators = self.block_generator()
        d = Hb.dim
        if self.noise.is_noiseless:
            cols = np.zeros((d, 4), dtype=complex)
            cols[idx, np.arange(4)] = 1.0
            final = propagate_vectors(Hb, cols, times, steps_per_period=spp)[-1]
            amps = final[idx] * ph[:, None]
            outputs = np.einsum("ki,lj->ijkl", amps, amps.conj())
        else:
            units = np.zeros((16, d, d), dtype=complex)
            for n, (i, j) in enumerate(np.ndindex(4, 4)):
                units[n, idx[i], idx[j]] = 1.0
            final = propagate_densities(Hb, units, dissipators, times, steps_per_period=spp)[-1]
            blocks = final[:, idx][:, :, idx] * np.outer(ph, ph.conj())
            outputs = blocks.reshape(4, 4, 4, 4)
        return LogicalChannel(outputs)


def _excitations(label: str) -> int:
    return 0 if label == "G" else int(label[0])


def compile_gate(config: TwoQubitConfig, spec: TwoQubitGateSpec) -> PulseSequence:
    """Two-segment sequence with pulse areas calibrated to the actual <--|a_l a_r^dag|2-,G>."""
    params = config.params
    w = double_excitation_frequencies(params)
    m_mm, _ = ancilla_matrix_elements(params)
    return compile_two_qubit(spec.alpha, spec.vartheta, spec.phi, config.envelope, params.coupling_peak,
                             w.minus, w.plus, matrix_element=abs(m_mm))


def build_problem(spec: TwoQubitGateSpec, config: TwoQubitConfig | None = None,
                  noise: NoiseModel | None = None) -> TwoQubitProblem:
    config = config or TwoQubitConfig()
    params = config.params
    sector = dressed_sector(params)
    w = sector.vectors
    ops = _full_operators(params)

    def compress(m):
        return w.conj().T @ m @ w

    hop = ops["a_l"] @ ops["a_r"].conj().T
    control = np.sqrt(2) * compress(hop + hop.conj().T)
    sequence = compile_gate(config, spec)
    if config.frame == "lab":
        H = lab_frame_hamiltonian(np.diag(sector.energies).astype(complex), control, sequence)
    else:
        H = rwa_hamiltonian(sector.energies, control, sequence)
    collapse = {k: compress(v) for k, v in ops.items()}
    return TwoQubitProblem(config, spec, sector, sequence, H, collapse, noise or NoiseModel())


def run_two_qubit_gate(spec: TwoQubitGateSpec, config: TwoQubitConfig | None = None,
                       noise: NoiseModel | None = None, psi0_logical=(0.0, 0.0, 0.0, 1.0)) -> SimResult:
    return build_problem(spec, config, noise).run(psi0_logical)


@dataclass(frozen=True)
class CnotReport:
    basis_fidelities: tuple[float, ...]   # |++>, |+->, |-+>, |-->, uniform superposition
    basis_average: float
    grid_average: float
    haar_average: float


def two_qubit_grid_states(n_theta: int = 11, n_phi: int = 4) -> np.ndarray:
    """Product states of single-qubit grid points cos(t)|-> + sin(t)e^{ip}|+> on each qubit.

    Components are returned in the (|++>, |+->, |-+>, |-->) ordering.
    """
    from .gates_metrics import fidelity_grid_states

    single = fidelity_grid_states(n_theta, n_phi)[:, ::-1]   # reorder to (|+>, |->)
    return np.array([np.kron(a, b) for a in single for b in single])


def cnot_report(problem: TwoQubitProblem) -> CnotReport:
    """Fidelity summary for a two-qubit gate run; all values use the realized target."""
    ch = problem.channel()
    target = problem.target
    inputs = list(np.eye(4, dtype=complex)) + [np.full(4, 0.5, dtype=complex)]
    fids = tuple(state_fidelity(ch(psi), target @ psi) for psi in inputs)
    grid = average_gate_fidelity(ch, target, two_qubit_grid_states())
    return CnotReport(fids, float(np.mean(fids)), grid, ch.haar_average_fidelity(target))
