"""Fixed-step RK4 propagation of state vectors and density matrices.

Hamiltonians have the form ``H(t) = H_static + sum_c coeff_c(t) O_c`` where the
coefficients are defined piecewise (one piece per pulse segment). Integration
steps never straddle a piece boundary, so phase jumps and envelope edges are
resolved exactly. Nothing is renormalized along the way: norm/trace drift is
returned as a convergence diagnostic.

The master equation follows

    drho/dt = i [rho, H] + sum_k (r_k / 2) (2 A_k rho A_k^dag - A_k^dag A_k rho - rho A_k^dag A_k)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .pulses import PulseSequence

TWO_PI = 2 * np.pi
DEFAULT_STEPS_PER_PERIOD = 384
MIN_STEPS_PER_PERIOD = 50


class ResolutionError(ValueError):
    """Step too coarse for the fastest frequency in the problem."""


class DivergenceError(FloatingPointError):
    """NaN or inf appeared during integration."""


class IntegrationAccuracyError(RuntimeError):
    """Trace drift above tolerance in a master-equation run."""


@dataclass(frozen=True, eq=False)
class Piece:
    """Time-dependent part of H on [start, stop]: sum_c coefficients(t)[c] * operators[c]."""

    start: float
    stop: float
    operators: tuple[np.ndarray, ...]
    coefficients: Callable[[np.ndarray], np.ndarray]

    def coeffs(self, t: np.ndarray) -> np.ndarray:
        c = np.asarray(self.coefficients(np.asarray(t, dtype=float)))
        return c.reshape(len(self.operators), -1)


@dataclass(frozen=True, eq=False)
class TimeDependentHamiltonian:
    static: np.ndarray
    pieces: tuple[Piece, ...] = ()
    max_frequency: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "static", np.asarray(self.static, dtype=complex))
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @property
    def dim(self) -> int:
        return self.static.shape[0]

    @property
    def breakpoints(self) -> np.ndarray:
        pts = {0.0}
        for p in self.pieces:
            pts.update((p.start, p.stop))
        return np.array(sorted(pts))

    def piece_at(self, t: float) -> Piece | None:
        for p in self.pieces:
            if p.start <= t < p.stop:
                return p
        if self.pieces and t == self.pieces[-1].stop:
            return self.pieces[-1]
        return None

    def __call__(self, t: float) -> np.ndarray:
        out = self.static.copy()
        p = self.piece_at(t)
        if p is not None:
            c = p.coeffs(np.array([t]))[:, 0]
            for coef, op in zip(c, p.operators):
                out = out + coef * op
        return out

    def with_static(self, extra: np.ndarray) -> "TimeDependentHamiltonian":
        return replace(self, static=self.static + extra)

    def scaled_drive(self, factor: float) -> "TimeDependentHamiltonian":
        pieces = tuple(
            Piece(p.start, p.stop, p.operators, (lambda t, f=p.coefficients: factor * np.asarray(f(t))))
            for p in self.pieces
        )
        return replace(self, pieces=pieces)

    def restricted(self, basis: np.ndarray) -> "TimeDependentHamiltonian":
        """Compress onto the span of the orthonormal columns of ``basis`` (W^dag H W)."""
        w = np.asarray(basis, dtype=complex)
        pieces = tuple(
            Piece(p.start, p.stop, tuple(w.conj().T @ o @ w for o in p.operators), p.coefficients)
            for p in self.pieces
        )
        return TimeDependentHamiltonian(w.conj().T @ self.static @ w, pieces, self.max_frequency)


def lab_frame_hamiltonian(
    static: np.ndarray, control: np.ndarray, sequence: PulseSequence, scale: float = 1.0
) -> TimeDependentHamiltonian:
    """H(t) = static + scale * f(t) * control with f the sequence's two-tone drive."""
    pieces = []
    starts = sequence.boundaries
    for k, seg in enumerate(sequence.segments):
        t0 = float(starts[k])
        pieces.append(
            Piece(
                t0,
                float(starts[k + 1]),
                (np.asarray(control, dtype=complex),),
                (lambda t, seg=seg, t0=t0: scale * seg.value(t, t0)),
            )
        )
    return TimeDependentHamiltonian(static, tuple(pieces), max(sequence.max_carrier, spectral_range(static)))


def spectral_range(static: np.ndarray) -> float:
    """Largest Bohr frequency of a static Hermitian matrix (sets the step as much as the carriers do)."""
    m = np.asarray(static, dtype=complex)
    e = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return float(e[-1] - e[0])


@dataclass(frozen=True)
class NoiseModel:
    """Cavity decay kappa, transmon decay gamma1 and dephasing gamma2 (rad/s)."""

    kappa: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        if min(self.kappa, self.gamma1, self.gamma2) < 0:
            raise ValueError("decoherence rates must be non-negative")

    @property
    def is_noiseless(self) -> bool:
        return self.kappa == 0 and self.gamma1 == 0 and self.gamma2 == 0

    def dissipators(self, a: np.ndarray, sm: np.ndarray, sz: np.ndarray) -> list[tuple[float, np.ndarray]]:
        """(rate, collapse operator) pairs for one transmon/cavity pair."""
        terms = [(self.kappa, a), (self.gamma1, sm), (self.gamma2, sz)]
        return [(r, np.asarray(op, dtype=complex)) for r, op in terms if r > 0]


@dataclass(eq=False)
class SimResult:
    times: np.ndarray
    states: np.ndarray
    drift: float
    populations: dict[str, np.ndarray] = field(default_factory=dict)
    logical: np.ndarray | None = None
    leakage: np.ndarray | None = None
    fidelity: np.ndarray | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def is_density(self) -> bool:
        return self.states.ndim == 3


def default_step(max_frequency: float, steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> float:
    if max_frequency <= 0:
        raise ValueError("cannot choose a default step without a positive max frequency")
    return TWO_PI / max_frequency / steps_per_period


def _check_step(step: float, max_frequency: float) -> None:
    if step <= 0:
        raise ResolutionError("step must be positive")
    if max_frequency > 0 and step > TWO_PI / max_frequency / MIN_STEPS_PER_PERIOD:
        raise ResolutionError(
            f"step {step:.3e} s does not resolve the {max_frequency / TWO_PI:.4e} Hz carrier "
            f"(need <= 1/{MIN_STEPS_PER_PERIOD} period)"
        )


def _knots(H: TimeDependentHamiltonian, t_grid: np.ndarray) -> np.ndarray:
    t0, t1 = t_grid[0], t_grid[-1]
    bp = H.breakpoints
    inner = bp[(bp > t0) & (bp < t1)]
    k = np.union1d(t_grid, inner)
    # merge knots closer than float noise
    keep = np.concatenate([[True], np.diff(k) > 1e-9 * max(abs(t1), 1e-30)])
    k = k[keep]
    k[-1] = t1
    return k


def _piece_for_interval(H: TimeDependentHamiltonian, a: float, b: float) -> Piece | None:
    mid = 0.5 * (a + b)
    for p in H.pieces:
        if p.start <= mid <= p.stop:
            return p
    return None


class _Stepper:
    """RK4 over y' = (A + sum_c c_c(t) B_c) y for a linear generator given as callables."""

    def __init__(self, apply_static, apply_ops_factory):
        self.apply_static = apply_static
        self.apply_ops_factory = apply_ops_factory

    def run(self, y, piece, a, b, step):
        n = max(1, int(np.ceil((b - a) / step - 1e-9)))
        h = (b - a) / n
        ts = a + h * np.arange(n)
        f0 = fm = f1 = None
        apply_ops = None
        if piece is not None:
            apply_ops = self.apply_ops_factory(piece)
            f0, fm, f1 = piece.coeffs(ts), piece.coeffs(ts + h / 2), piece.coeffs(ts + h)
        A = self.apply_static
        for k in range(n):
            if apply_ops is None:
                k1 = A(y)
                k2 = A(y + (h / 2) * k1)
                k3 = A(y + (h / 2) * k2)
                k4 = A(y + h * k3)
            else:
                k1 = A(y) + apply_ops(y, f0[:, k])
                y2 = y + (h / 2) * k1
                k2 = A(y2) + apply_ops(y2, fm[:, k])
                y3 = y + (h / 2) * k2
                k3 = A(y3) + apply_ops(y3, fm[:, k])
                y4 = y + h * k3
                k4 = A(y4) + apply_ops(y4, f1[:, k])
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite values after integrating to t = {b:.6e} s")
        return y


class _StackedStepper:
    """RK4 with explicit generator matrices: one stacked matmul per stage evaluation."""

    def __init__(self, static: np.ndarray, ops_factory):
        self.static = static
        self.ops_factory = ops_factory
        self.D = static.shape[0]

    def run(self, y, piece, a, b, step):
        n = max(1, int(np.ceil((b - a) / step - 1e-9)))
        h = (b - a) / n
        if piece is None:
            stack, coeffs = self.static, None
        else:
            ops = self.ops_factory(piece)
            stack = np.vstack([self.static] + list(ops))
            ts = a + h * np.arange(n)
            coeffs = [piece.coeffs(t) for t in (ts, ts + h / 2, ts + h)]
        D = self.D
        K = 0 if coeffs is None else coeffs[0].shape[0]
        tail = y.shape[1:]

        def f(y, which, k):
            z = stack @ y
            if K == 0:
                return z
            z = z.reshape((K + 1, D) + tail)
            c = coeffs[which][:, k]
            out = z[0].copy()
            for j in range(K):
                out += c[j] * z[j + 1]
            return out

        for k in range(n):
            k1 = f(y, 0, k)
            k2 = f(y + (h / 2) * k1, 1, k)
            k3 = f(y + (h / 2) * k2, 1, k)
            k4 = f(y + h * k3, 2, k)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite values after integrating to t = {b:.6e} s")
        return y


# generators up to this size are stepped by batched RK4 propagator matrices
MATRIX_STEPPER_MAX_DIM = 40
_CHUNK = 2048


def _chain_product(mats: np.ndarray) -> np.ndarray:
    """mats[n-1] @ ... @ mats[0] by pairwise reduction."""
    while len(mats) > 1:
        even = len(mats) - len(mats) % 2
        paired = mats[1:even:2] @ mats[0:even:2]
        mats = np.concatenate([paired, mats[even:]]) if even < len(mats) else paired
    return mats[0]


class _MatrixStepper:
    """Same RK4 scheme as _Stepper, but the one-step propagators are formed for many steps at
    once and multiplied together. Exactly the RK4 map, just evaluated in a different order."""

    def __init__(self, static: np.ndarray, ops_factory):
        self.static = static
        self.ops_factory = ops_factory
        self.eye = np.eye(static.shape[0], dtype=complex)

    def _propagators(self, L0, Lm, L1, h):
        eye = self.eye
        x1 = eye + (h / 2) * L0
        x2 = eye + (h / 2) * (Lm @ x1)
        x3 = eye + h * (Lm @ x2)
        return eye + (h / 6) * (L0 + 2 * (Lm @ x1) + 2 * (Lm @ x2) + L1 @ x3)

    def run(self, y, piece, a, b, step):
        n = max(1, int(np.ceil((b - a) / step - 1e-9)))
        h = (b - a) / n
        A = self.static
        if piece is None:
            p = self._propagators(A, A, A, h)
            y = np.linalg.matrix_power(p, n) @ y
        else:
            ops = np.array(self.ops_factory(piece))
            for s0 in range(0, n, _CHUNK):
                ts = a + h * np.arange(s0, min(n, s0 + _CHUNK))
                gens = [A + np.einsum("kn,kij->nij", piece.coeffs(t), ops) for t in (ts, ts + h / 2, ts + h)]
                y = _chain_product(self._propagators(*gens, h)) @ y
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite values after integrating to t = {b:.6e} s")
        return y


def _resolve_grid(H, t_grid, step, steps_per_period):
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be a strictly increasing 1-D array with at least two points")
    if step is None:
        step = default_step(H.max_frequency, steps_per_period)
    _check_step(step, H.max_frequency)
    return t_grid, step


def propagate_vectors(H: TimeDependentHamiltonian, psi0: np.ndarray, t_grid, step=None,
                      steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> np.ndarray:
    """Batched Schroedinger propagation. psi0 has shape (d,) or (d, B); returns (T, d[, B])."""
    t_grid, step = _resolve_grid(H, t_grid, step, steps_per_period)
    y = np.array(psi0, dtype=complex)
    static = -1j * H.static

    if H.dim <= MATRIX_STEPPER_MAX_DIM:
        stepper = _MatrixStepper(static, lambda piece: [-1j * o for o in piece.operators])
    else:
        stepper = _StackedStepper(static, lambda piece: [-1j * o for o in piece.operators])
    knots = _knots(H, t_grid)
    out = np.empty((len(t_grid),) + y.shape, dtype=complex)
    out[0] = y
    rec = 1
    for a, b in zip(knots[:-1], knots[1:]):
        y = stepper.run(y, _piece_for_interval(H, a, b), a, b, step)
        if rec < len(t_grid) and np.isclose(b, t_grid[rec], rtol=0, atol=1e-9 * abs(t_grid[-1])):
            out[rec] = y
            rec += 1
    return out


def _superop_commutator(h: np.ndarray) -> np.ndarray:
    """rho -> -i(H rho - rho H^dag) on row-major vec(rho); the commutator when H is Hermitian."""
    d = h.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.conj()))


def _superop_dissipator(dissipators, d: int) -> np.ndarray:
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    for rate, A in dissipators:
        AdA = A.conj().T @ A
        out += (rate / 2) * (2 * np.kron(A, A.conj()) - np.kron(AdA, eye) - np.kron(eye, AdA.T))
    return out


def restrict_open_system(H: TimeDependentHamiltonian, dissipators: Sequence[tuple[float, np.ndarray]],
                         indices: Sequence[int], max_frequency: float | None = None
                         ) -> tuple[TimeDependentHamiltonian, list[tuple[float, np.ndarray]]]:
    """Exact reduced generator for a block of states that nothing re-enters.

    Requires H(t) not to couple the block to the rest, and the caller to know
    that population leaving the block never comes back (e.g. decay out of the
    highest excitation sector in play). The block density matrix then obeys

        drho/dt = -i (Heff rho - rho Heff^dag) + sum_k r_k (P A_k P) rho (P A_k P)^dag

    with Heff = P H P - (i/2) sum_k r_k P A_k^dag A_k P (the returned dissipators
    carry the (P A P)^dag (P A P) share of that, the static part the rest), which is not trace
    preserving: lost trace is population that left the block. ``max_frequency``
    replaces the step-setting frequency of H (the block usually needs less).
    """
    idx = np.asarray(indices)
    rest = np.setdiff1d(np.arange(H.dim), idx)
    mats = [H.static] + [o for p in H.pieces for o in p.operators]
    if any(np.abs(m[np.ix_(idx, rest)]).max(initial=0.0) > 0 for m in mats):
        raise ValueError("the Hamiltonian couples the block to the rest of the space")
    w = np.eye(H.dim)[:, idx]
    Hb = H.restricted(w)
    decay = np.zeros((len(idx), len(idx)), dtype=complex)
    inside = []
    for r, A in dissipators:
        A = np.asarray(A, dtype=complex)
        a_in = A[np.ix_(idx, idx)]
        # the in-block jump supplies its own anticommutator; add only what leaves the block
        decay += r * ((A.conj().T @ A)[np.ix_(idx, idx)] - a_in.conj().T @ a_in)
        if np.any(a_in != 0):
            inside.append((r, a_in))
    mf = Hb.max_frequency if max_frequency is None else max_frequency
    return replace(Hb, static=Hb.static - 0.5j * decay, max_frequency=mf), inside


# density matrices of dimension above this use the matrix-form RHS
SUPEROPERATOR_MAX_DIM = 10


def propagate_densities(H: TimeDependentHamiltonian, rho0: np.ndarray, dissipators: Sequence[tuple[float, np.ndarray]],
                        t_grid, step=None, steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> np.ndarray:
    """Batched master-equation propagation. rho0 has shape (d, d) or (B, d, d); returns (T, [B,] d, d).

    Input matrices need not be Hermitian or unit-trace: the map is linear, so
    operator bases such as |i><j| can be propagated to reconstruct a channel.
    """
    t_grid, step = _resolve_grid(H, t_grid, step, steps_per_period)
    rho0 = np.array(rho0, dtype=complex)
    single = rho0.ndim == 2
    batch = rho0[None] if single else rho0
    B, d, _ = batch.shape
    dissipators = [(float(r), np.asarray(A, dtype=complex)) for r, A in dissipators if r != 0]

    if d <= SUPEROPERATOR_MAX_DIM:
        L0 = _superop_commutator(H.static) + _superop_dissipator(dissipators, d)

        if d * d <= MATRIX_STEPPER_MAX_DIM:
            stepper = _MatrixStepper(L0, lambda piece: [_superop_commutator(o) for o in piece.operators])
        else:
            stepper = _StackedStepper(L0, lambda piece: [_superop_commutator(o) for o in piece.operators])
        y = batch.reshape(B, d * d).T.copy()
        to_mats = lambda y: y.T.reshape(B, d, d)
    else:
        heff = H.static - 0.5j * sum((r * (A.conj().T @ A) for r, A in dissipators), np.zeros((d, d), complex))
        jumps = np.array([A for _, A in dissipators]) if dissipators else np.zeros((0, d, d), complex)
        jumps_dag = np.conj(np.transpose(jumps, (0, 2, 1)))
        rates = np.array([r for r, _ in dissipators]).reshape(-1, 1, 1, 1)
        heff_dag = heff.conj().T

        def static_rhs(rho):
            out = -1j * (heff @ rho - rho @ heff_dag)
            if len(jumps):
                out = out + np.sum(rates * (jumps[:, None] @ rho[None] @ jumps_dag[:, None]), axis=0)
            return out

        def ops_factory(piece):
            ops = piece.operators
            def apply(rho, c):
                h = sum(ci * o for ci, o in zip(c, ops))
                return -1j * (h @ rho - rho @ h.conj().T)
            return apply

        stepper = _Stepper(static_rhs, ops_factory)
        y = batch.copy()
        to_mats = lambda y: y

    knots = _knots(H, t_grid)
    out = np.empty((len(t_grid), B, d, d), dtype=complex)
    out[0] = batch
    rec = 1
    for a, b in zip(knots[:-1], knots[1:]):
        y = stepper.run(y, _piece_for_interval(H, a, b), a, b, step)
        if rec < len(t_grid) and np.isclose(b, t_grid[rec], rtol=0, atol=1e-9 * abs(t_grid[-1])):
            out[rec] = to_mats(y)
            rec += 1
    return out[:, 0] if single else out


def _as_vector(psi0: np.ndarray, d: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (d,):
        raise ValueError(f"state vector of shape ({d},) expected, got {psi0.shape}")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1) > 1e-9:
        raise ValueError(f"initial state not normalized (norm {norm:.12f})")
    return psi0


def _as_density(rho0: np.ndarray, d: int) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape == (d,):
        rho0 = np.outer(_as_vector(rho0, d), rho0.conj())
    if rho0.shape != (d, d):
        raise ValueError(f"density matrix of shape ({d}, {d}) expected, got {rho0.shape}")
    if abs(np.trace(rho0) - 1) > 1e-8:
        raise ValueError("initial density matrix must have unit trace")
    if np.linalg.norm(rho0 - rho0.conj().T) > 1e-10:
        raise ValueError("initial density matrix must be Hermitian")
    return rho0


def evolve_unitary(H: TimeDependentHamiltonian, psi0: np.ndarray, t_grid, step=None,
                   steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> SimResult:
    """Integrate i dpsi/dt = H(t) psi; ``drift`` is the final |norm - 1|."""
    psi0 = _as_vector(psi0, H.dim)
    states = propagate_vectors(H, psi0, t_grid, step, steps_per_period)
    drift = float(abs(np.linalg.norm(states[-1]) - 1))
    return SimResult(np.asarray(t_grid, dtype=float), states, drift)


TRACE_TOLERANCE = 1e-6


def evolve_lindblad(H: TimeDependentHamiltonian, rho0: np.ndarray, dissipators: Sequence[tuple[float, np.ndarray]],
                    t_grid, step=None, steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> SimResult:
    """Integrate the master equation; raises if the trace drifts by more than 1e-6."""
    rho0 = _as_density(rho0, H.dim)
    states = propagate_densities(H, rho0, dissipators, t_grid, step, steps_per_period)
    traces = np.real(np.trace(states, axis1=1, axis2=2))
    drift = float(np.max(np.abs(traces - 1)))
    if drift > TRACE_TOLERANCE:
        raise IntegrationAccuracyError(f"trace drift {drift:.3e} exceeds {TRACE_TOLERANCE:g}")
    return SimResult(np.asarray(t_grid, dtype=float), states, drift)


class RotatingFrameHamiltonian:
    """H'(t) = U^dag(t) H(t) U(t) - G with U(t) = exp(-i G t), G static and Hermitian."""

    def __init__(self, H: TimeDependentHamiltonian | Callable[[float], np.ndarray], frame_generator: np.ndarray):
        g = np.asarray(frame_generator, dtype=complex)
        if np.linalg.norm(g - g.conj().T) > 1e-9 * max(np.linalg.norm(g), 1):
            raise ValueError("frame generator must be Hermitian")
        self.H = H
        self.generator = g
        self.energies, self.vectors = np.linalg.eigh(g)

    def unitary(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def __call__(self, t: float) -> np.ndarray:
        u = self.unitary(t)
        return u.conj().T @ self.H(t) @ u - self.generator


def to_rotating_frame(H, frame_generator: np.ndarray) -> RotatingFrameHamiltonian:
    return RotatingFrameHamiltonian(H, frame_generator)


def time_average(H: Callable[[float], np.ndarray], t0: float, period: float, samples: int = 2001) -> np.ndarray:
    """Trapezoidal average of H(t) over [t0, t0 + period]."""
    ts = np.linspace(t0, t0 + period, samples)
    vals = np.array([H(t) for t in ts])
    return trapezoid(vals, ts, axis=0) / period


def rwa_hamiltonian(energies: np.ndarray, control: np.ndarray, sequence: PulseSequence,
                    resonance_tol: float = 1e-6) -> TimeDependentHamiltonian:
    """Resonant (rotating-wave) part of ``f(t) control`` in the interaction picture of diag(energies).

    For every pair i, j with E_i - E_j equal to a carrier (within ``resonance_tol``
    relative), tone k contributes (Omega_k(t)/2) e^{i phi_k} V_ij |i><j| + h.c.
    Everything else is discarded.
    """
    e = np.asarray(energies, dtype=float)
    v = np.asarray(control, dtype=complex)
    d = len(e)
    gaps = e[:, None] - e[None, :]
    pieces = []
    starts = sequence.boundaries
    for k, seg in enumerate(sequence.segments):
        mats = []
        for omega, phase in ((seg.omega1, seg.phi1), (seg.omega2, seg.phi2)):
            mask = np.abs(gaps - omega) <= resonance_tol * omega
            m = np.where(mask, 0.5 * np.exp(1j * phase) * v, 0.0)
            mats.append(m + m.conj().T)
        t0 = float(starts[k])
        pieces.append(
            Piece(
                t0,
                float(starts[k + 1]),
                tuple(mats),
                (lambda t, seg=seg, t0=t0: np.array(seg.tone_amplitudes(t - t0))),
            )
        )
    peak = max(seg.envelope.peak for seg in sequence.segments)
    return TimeDependentHamiltonian(np.zeros((d, d), complex), tuple(pieces), peak)


def secular_components(op: np.ndarray, energies: np.ndarray, rel_tol: float = 1e-6) -> list[np.ndarray]:
    """Split ``op`` (written in the eigenbasis of diag(energies)) into parts of fixed Bohr frequency.

    In the interaction picture each part only picks up a phase e^{-i w t}; cross
    terms between different w oscillate and are dropped (secular approximation),
    which lets collapse operators be used unchanged in a rotating frame.
    """
    op = np.asarray(op, dtype=complex)
    e = np.asarray(energies, dtype=float)
    gaps = e[None, :] - e[:, None]
    scale = max(np.max(np.abs(e)), 1.0)
    parts: list[np.ndarray] = []
    remaining = np.abs(op) > 0
    while np.any(remaining):
        i, j = np.argwhere(remaining)[0]
        mask = remaining & (np.abs(gaps - gaps[i, j]) <= rel_tol * scale)
        parts.append(np.where(mask, op, 0.0))
        remaining &= ~mask
    return parts


def secular_part(op: np.ndarray, energies: np.ndarray, rel_tol: float = 1e-6) -> np.ndarray:
    """Non-rotating (energy-conserving) part of a static perturbation in the frame of diag(energies)."""
    e = np.asarray(energies, dtype=float)
    scale = max(np.max(np.abs(e)), 1.0)
    keep = np.abs(e[:, None] - e[None, :]) <= rel_tol * scale
    return np.where(keep, np.asarray(op, dtype=complex), 0.0)
