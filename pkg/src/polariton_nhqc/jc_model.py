"""Jaynes-Cummings Hamiltonian, dressed (polariton) spectrum and noise shifts.

All energies are angular frequencies in rad/s (hbar = 1). Only energy
differences are physical; absolute eigenvalues are whatever the numerical
diagonalization of ``(w_q/2) sz + w_c a^dag a + g (a s+ + a^dag s-)`` returns.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .hilbert import (
    HilbertSpace,
    Operator,
    dagger,
    embed,
    fock_annihilation,
    sigma_minus,
    sigma_x,
    sigma_z,
)

TWO_PI = 2 * np.pi


class DegeneracyError(RuntimeError):
    """Raised when a dressed doublet is degenerate and its labelling is ambiguous."""


@dataclass(frozen=True)
class JcParams:
    omega_q: float
    omega_c: float
    g: float
    n_fock: int = 5

    def __post_init__(self):
        if self.omega_q <= 0 or self.omega_c <= 0:
            raise ValueError("qubit and cavity frequencies must be positive")
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.n_fock < 3:
            raise ValueError("n_fock must be >= 3")
        if self.g > self.omega_c / 10:
            warnings.warn(
                f"g = {self.g:.3e} exceeds omega_c/10; the dressed-state drive scheme assumes g << omega_c",
                stacklevel=2,
            )

    @property
    def detuning(self) -> float:
        """Cavity-qubit detuning omega_c - omega_q."""
        return self.omega_c - self.omega_q

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace((2, self.n_fock))

    @classmethod
    def resonant(cls, omega_c: float, g_ratio: float = 1 / 20, n_fock: int = 5) -> "JcParams":
        return cls(omega_q=omega_c, omega_c=omega_c, g=g_ratio * omega_c, n_fock=n_fock)


def jc_operators(params: JcParams) -> dict[str, Operator]:
    """Embedded a, sigma_minus, sigma_z, sigma_x on transmon (x) cavity."""
    space = params.space
    return {
        "a": embed(fock_annihilation(params.n_fock), 1, space),
        "sm": embed(sigma_minus(), 0, space),
        "sz": embed(sigma_z(), 0, space),
        "sx": embed(sigma_x(), 0, space),
    }


def build_jc_hamiltonian(params: JcParams) -> Operator:
    ops = jc_operators(params)
    a, sm, sz = ops["a"], ops["sm"], ops["sz"]
    ad, sp = dagger(a), dagger(sm)
    return (
        (params.omega_q / 2) * sz
        + params.omega_c * (ad @ a)
        + params.g * ((a @ sp) + (ad @ sm))
    )


@dataclass(frozen=True, eq=False)
class PolaritonBasis:
    """Dressed eigenbasis of one JC pair.

    ``dressed[n] = (|n,->, |n,+>)`` and ``energies[n] = (E_{n,-}, E_{n,+})`` for
    excitation numbers 1 <= n <= n_fock - 1. The state ``|1, n_fock-1>`` has no
    partner inside the truncation and is kept separately as ``unpaired``.
    """

    params: JcParams
    ground: np.ndarray
    ground_energy: float
    dressed: dict[int, tuple[np.ndarray, np.ndarray]]
    energies: dict[int, tuple[float, float]]
    mixing_angles: dict[int, float]
    unpaired: np.ndarray
    unpaired_energy: float
    hamiltonian: Operator = field(repr=False)

    @property
    def minus(self) -> np.ndarray:
        return self.dressed[1][0]

    @property
    def plus(self) -> np.ndarray:
        return self.dressed[1][1]

    def eigenvectors(self) -> np.ndarray:
        """All eigenvectors as columns: |G>, then (|n,->, |n,+>) for each n, then the unpaired state."""
        cols = [self.ground]
        for n in sorted(self.dressed):
            cols.extend(self.dressed[n])
        cols.append(self.unpaired)
        return np.column_stack(cols)

    def eigenvalues(self) -> np.ndarray:
        vals = [self.ground_energy]
        for n in sorted(self.energies):
            vals.extend(self.energies[n])
        vals.append(self.unpaired_energy)
        return np.array(vals)


def dressed_spectrum(params: JcParams) -> PolaritonBasis:
    """Diagonalize the JC Hamiltonian block by block in excitation number.

    Phase convention: <1, n-1|n,+> >= 0 and <0, n|n,-> >= 0 (both real), which
    gives |1,+-> = (|0,1> +- |1,0>)/sqrt(2) at zero detuning.
    """
    H = build_jc_hamiltonian(params)
    space = params.space
    nf = params.n_fock
    m = H.matrix

    ground = space.basis_state((0, 0))
    ground_energy = float(m[0, 0].real)

    dressed, energies, angles = {}, {}, {}
    for n in range(1, nf):
        idx = [space.basis_index((0, n)), space.basis_index((1, n - 1))]
        block = m[np.ix_(idx, idx)]
        vals, vecs = np.linalg.eigh(block)
        if vals[1] - vals[0] < 1e-9 * params.g:
            raise DegeneracyError(f"dressed doublet n={n} is degenerate")
        v_minus, v_plus = vecs[:, 0].copy(), vecs[:, 1].copy()
        # eigh returns real vectors for this real symmetric block; fix signs only
        if v_plus[1].real < 0:
            v_plus = -v_plus
        if v_minus[0].real < 0:
            v_minus = -v_minus
        minus = np.zeros(space.dim, dtype=complex)
        plus = np.zeros(space.dim, dtype=complex)
        minus[idx] = v_minus
        plus[idx] = v_plus
        dressed[n] = (minus, plus)
        energies[n] = (float(vals[0]), float(vals[1]))
        angles[n] = float(np.arctan2(v_plus[1].real, v_plus[0].real))

    top = space.basis_index((1, nf - 1))
    unpaired = space.basis_state((1, nf - 1))
    return PolaritonBasis(
        params=params,
        ground=ground,
        ground_energy=ground_energy,
        dressed=dressed,
        energies=energies,
        mixing_angles=angles,
        unpaired=unpaired,
        unpaired_energy=float(m[top, top].real),
        hamiltonian=H,
    )


def closed_form_splitting(params: JcParams, n: int) -> float:
    """E_{n,+} - E_{n,-} = sqrt(delta^2 + 4 n g^2)."""
    return float(np.sqrt(params.detuning**2 + 4 * n * params.g**2))


class TransitionFrequencies(NamedTuple):
    minus: float
    plus: float


def transition_frequencies(basis: PolaritonBasis) -> TransitionFrequencies:
    """omega_+- = E_{1,+-} - E_G."""
    e_minus, e_plus = basis.energies[1]
    return TransitionFrequencies(e_minus - basis.ground_energy, e_plus - basis.ground_energy)


class NoiseShifts(NamedTuple):
    exact_minus: float
    exact_plus: float
    approx_minus: float
    approx_plus: float


def approximate_noise_shifts(params: JcParams, h: float, axis: str) -> tuple[float, float]:
    """Second-order estimates: x -> -+ (h/w_q)^2 g ; z -> +- (h/g)^2 g/2."""
    if axis == "x":
        s = (h / params.omega_q) ** 2 * params.g
        return s, -s
    if axis == "z":
        s = (h / params.g) ** 2 * params.g / 2
        return -s, s
    raise ValueError(f"axis must be 'x' or 'z', got {axis!r}")


def noise_energy_shifts(params: JcParams, h: float, axis: str) -> NoiseShifts:
    """Shift of E_{1,-} and E_{1,+} under a static transmon term h * sigma_axis.

    The exact value comes from rediagonalizing H + h sigma_axis; perturbed levels
    are matched to the unperturbed |1,+-> by maximum overlap.
    """
    approx = approximate_noise_shifts(params, h, axis)
    if h == 0:
        return NoiseShifts(0.0, 0.0, *approx)
    if abs(h) >= params.g:
        warnings.warn("noise amplitude h >= g is outside the perturbative regime", stacklevel=2)

    basis = dressed_spectrum(params)
    ops = jc_operators(params)
    pert = basis.hamiltonian.matrix + h * ops["s" + axis].matrix
    vals, vecs = np.linalg.eigh(pert)

    shifts = []
    for state, energy in zip(basis.dressed[1], basis.energies[1]):
        overlaps = np.abs(vecs.conj().T @ state) ** 2
        k = int(np.argmax(overlaps))
        shifts.append(float(vals[k] - energy))
    return NoiseShifts(shifts[0], shifts[1], *approx)


def polariton_matrix_elements(basis: PolaritonBasis) -> tuple[complex, complex]:
    """<G|sigma_x|1,-> and <G|sigma_x|1,+>."""
    sx = jc_operators(basis.params)["sx"].matrix
    return (
        complex(np.vdot(basis.ground, sx @ basis.minus)),
        complex(np.vdot(basis.ground, sx @ basis.plus)),
    )
