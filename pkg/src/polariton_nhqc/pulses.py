"""Two-tone drive envelopes and holonomic pulse-sequence compilation.

A segment drives

    f(t) = Omega(t) sin(theta/2) cos(omega1 t - phi1) + Omega(t) cos(theta/2) cos(omega2 t - phi2)

so that Omega_1 / Omega_2 = tan(theta/2) and sqrt(Omega_1^2 + Omega_2^2) = Omega(t).
Carrier phases use absolute time; a new segment changes phi1/phi2 but does not
restart the carrier clock. Durations are solved from the pulse-area condition
``integral of Omega(t)/2 over the segment == half_area``.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2 * np.pi
ENVELOPE_KINDS = ("square", "sin2")


class OutOfRangeError(ValueError):
    """Raised when a drive is evaluated outside its sequence."""


@dataclass(frozen=True)
class Envelope:
    kind: str
    peak: float
    duration: float

    def __post_init__(self):
        if self.kind not in ENVELOPE_KINDS:
            raise ValueError(f"envelope kind must be one of {ENVELOPE_KINDS}, got {self.kind!r}")
        if self.peak <= 0 or self.duration <= 0:
            raise ValueError("envelope peak and duration must be positive")

    def __call__(self, t_local):
        t_local = np.asarray(t_local, dtype=float)
        if self.kind == "square":
            return np.full_like(t_local, self.peak)
        return self.peak * np.sin(np.pi * t_local / self.duration) ** 2

    @property
    def area(self) -> float:
        """Integral of the envelope over its duration."""
        return self.peak * self.duration * (1.0 if self.kind == "square" else 0.5)

    @classmethod
    def for_half_area(cls, kind: str, peak: float, half_area: float) -> "Envelope":
        """Envelope whose integral of Omega/2 equals ``half_area``."""
        if kind == "square":
            duration = 2 * half_area / peak
        elif kind == "sin2":
            duration = 4 * half_area / peak
        else:
            raise ValueError(f"envelope kind must be one of {ENVELOPE_KINDS}, got {kind!r}")
        return cls(kind, peak, duration)


@dataclass(frozen=True)
class PulseSegment:
    envelope: Envelope
    theta: float
    phi1: float
    phi2: float
    omega1: float
    omega2: float
    half_area: float

    @property
    def duration(self) -> float:
        return self.envelope.duration

    def tone_amplitudes(self, t_local) -> tuple[np.ndarray, np.ndarray]:
        env = self.envelope(t_local)
        return env * np.sin(self.theta / 2), env * np.cos(self.theta / 2)

    def value(self, t, t_start: float):
        """Drive f(t) at absolute times ``t`` for a segment starting at ``t_start``."""
        t = np.asarray(t, dtype=float)
        amp1, amp2 = self.tone_amplitudes(t - t_start)
        return amp1 * np.cos(self.omega1 * t - self.phi1) + amp2 * np.cos(self.omega2 * t - self.phi2)


@dataclass(frozen=True)
class PulseSequence:
    segments: tuple[PulseSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("a pulse sequence needs at least one segment")

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    @property
    def duration(self) -> float:
        return float(self.boundaries[-1])

    @property
    def total_half_area(self) -> float:
        return float(sum(s.half_area for s in self.segments))

    @property
    def max_carrier(self) -> float:
        return max(max(s.omega1, s.omega2) for s in self.segments)

    def segment_index(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        b = self.boundaries
        if np.any(t < 0) or np.any(t > b[-1] * (1 + 1e-12)):
            raise OutOfRangeError(f"time outside [0, {b[-1]:.6e}] s")
        return np.clip(np.searchsorted(b, t, side="right") - 1, 0, len(self.segments) - 1)

    def envelope_value(self, t):
        """Instantaneous Omega(t)."""
        t = np.asarray(t, dtype=float)
        idx = self.segment_index(t)
        starts = self.boundaries[:-1]
        out = np.empty_like(t)
        for k, seg in enumerate(self.segments):
            mask = idx == k
            out[mask] = seg.envelope(t[mask] - starts[k])
        return out

    def to_table(self) -> str:
        return format_table(self)


def drive_value(seq: PulseSequence, t):
    """f(t) of the sequence; raises OutOfRangeError outside [0, duration]."""
    t_arr = np.asarray(t, dtype=float)
    idx = seq.segment_index(t_arr)
    starts = seq.boundaries[:-1]
    out = np.empty_like(t_arr)
    flat_t, flat_idx, flat_out = t_arr.reshape(-1), idx.reshape(-1), out.reshape(-1)
    for k, seg in enumerate(seq.segments):
        mask = flat_idx == k
        flat_out[mask] = seg.value(flat_t[mask], starts[k])
    return float(out) if out.ndim == 0 else out


def _build(rows: Iterable[tuple[float, float, float]], theta, kind, peak, omega1, omega2) -> PulseSequence:
    segments = []
    for half_area, phi1, phi2 in rows:
        env = Envelope.for_half_area(kind, peak, half_area)
        segments.append(PulseSegment(env, theta, phi1, phi2, omega1, omega2, half_area))
    return PulseSequence(tuple(segments))


def _warn_strong_drive(peak: float, coupling: float | None, label: str) -> None:
    if coupling is not None and peak > coupling / 10:
        warnings.warn(f"{label} peak {peak:.3e} exceeds a tenth of {coupling:.3e}; RWA residuals grow", stacklevel=3)


def dct_phase_table(gamma: float, phi: float) -> list[tuple[float, float, float]]:
    """(half_area, phi1, phi2) for the six dynamically corrected segments."""
    p = np.pi
    return [
        (p / 4, phi + p, p),
        (p / 2, phi + p + p / 2, p + p / 2),
        (p / 4, phi + p, p),
        (p / 4, phi + gamma, gamma),
        (p / 2, phi + gamma + p / 2, gamma + p / 2),
        (p / 4, phi + gamma, gamma),
    ]


def single_loop_phase_table(gamma: float, phi: float) -> list[tuple[float, float, float]]:
    return [(np.pi / 2, phi + np.pi, np.pi), (np.pi / 2, phi + gamma, gamma)]


def compile_single_qubit_dct(
    gamma: float,
    theta: float,
    phi: float,
    envelope: str,
    peak: float,
    omega_minus: float,
    omega_plus: float,
    coupling: float | None = None,
) -> PulseSequence:
    """Six-segment dynamically corrected holonomic sequence.

    Tone 1 sits on omega_minus (|G> <-> |->), tone 2 on omega_plus (|G> <-> |+>).
    ``coupling`` (the JC g) only enables the weak-drive warning.
    """
    _warn_strong_drive(peak, coupling, "drive")
    return _build(dct_phase_table(gamma, phi), theta, envelope, peak, omega_minus, omega_plus)


def compile_single_loop(
    gamma: float,
    theta: float,
    phi: float,
    envelope: str,
    peak: float,
    omega_minus: float,
    omega_plus: float,
    coupling: float | None = None,
) -> PulseSequence:
    """Two-segment single-loop sequence realizing the same gate without correction."""
    _warn_strong_drive(peak, coupling, "drive")
    return _build(single_loop_phase_table(gamma, phi), theta, envelope, peak, omega_minus, omega_plus)


def two_qubit_phase_table(alpha: float, phi: float, half_area: float) -> list[tuple[float, float, float]]:
    return [(half_area, phi - np.pi, np.pi), (half_area, phi + alpha, alpha)]


def two_qubit_amplitudes(j1: float, j2: float) -> tuple[float, float]:
    """(J_c, vartheta) from the two tone amplitudes."""
    return float(np.hypot(j1, j2)), float(2 * np.arctan2(j1, j2))


def compile_two_qubit(
    alpha: float,
    vartheta: float,
    phi: float,
    envelope: str,
    coupling_peak: float,
    omega_minus_prime: float,
    omega_plus_prime: float,
    matrix_element: float = 1 / np.sqrt(2),
) -> PulseSequence:
    """Two-segment modulation of the inter-cavity coupling.

    Tone 1 (omega'_-) addresses |--> <-> |2-,G>, tone 2 (omega'_+) addresses
    |-+> <-> |2-,G>. Each segment is a pi rotation of the bright state, i.e.
    integral of sqrt(2) |m| J_c dt = pi with m = <-+-|a_l a_r^dag|2-,G>; for
    m = 1/sqrt(2) that is integral of J_c dt = pi.
    """
    if coupling_peak > min(omega_minus_prime, omega_plus_prime) / 10:
        warnings.warn("coupling modulation is not weak compared to omega'_+-; RWA is questionable", stacklevel=2)
    half_area = np.pi / (2 * np.sqrt(2) * abs(matrix_element))
    rows = two_qubit_phase_table(alpha, phi, half_area)
    return _build(rows, vartheta, envelope, coupling_peak, omega_minus_prime, omega_plus_prime)


# plain-text segment table

TABLE_COLUMNS = ("kind", "peak_mhz", "duration_ns", "theta", "phi1", "phi2", "carrier1_ghz", "carrier2_ghz")


def format_table(seq: PulseSequence) -> str:
    """One row per segment; frequencies as f = omega / 2pi, angles in radians."""
    out = io.StringIO()
    out.write(" ".join(TABLE_COLUMNS) + "\n")
    for s in seq.segments:
        row = (
            s.envelope.kind,
            s.envelope.peak / (TWO_PI * 1e6),
            s.duration * 1e9,
            s.theta,
            s.phi1,
            s.phi2,
            s.omega1 / (TWO_PI * 1e9),
            s.omega2 / (TWO_PI * 1e9),
        )
        out.write(row[0] + " " + " ".join(repr(float(v)) for v in row[1:]) + "\n")
    return out.getvalue()


def parse_table(text: str) -> PulseSequence:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if tuple(lines[0]) != TABLE_COLUMNS:
        raise ValueError(f"unexpected header {lines[0]}")
    segments = []
    for fields in lines[1:]:
        kind = fields[0]
        peak_mhz, dur_ns, theta, phi1, phi2, c1, c2 = map(float, fields[1:])
        env = Envelope(kind, peak_mhz * TWO_PI * 1e6, dur_ns * 1e-9)
        segments.append(
            PulseSegment(env, theta, phi1, phi2, c1 * TWO_PI * 1e9, c2 * TWO_PI * 1e9, env.area / 2)
        )
    return PulseSequence(tuple(segments))


def segment_areas(seq: PulseSequence, points: int = 4001) -> np.ndarray:
    """Quadrature of integral Omega(t)/2 dt for each segment (Simpson's rule)."""
    from scipy.integrate import simpson

    areas = []
    for s in seq.segments:
        t = np.linspace(0.0, s.duration, points)
        areas.append(simpson(s.envelope(t) / 2, x=t))
    return np.array(areas)


def phases(seq: PulseSequence) -> Sequence[tuple[float, float]]:
    return [(s.phi1, s.phi2) for s in seq.segments]
