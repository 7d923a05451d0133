"""JSON experiment configuration.

Frequencies are given as f in GHz, MHz or kHz and converted to angular
frequencies omega = 2 pi f (rad/s). Angles are given in units of pi, so
``gamma_pi = 1`` means gamma = pi. Every block and key is optional; missing
values take the defaults below, which are the reference parameter set.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from typing import Any

import numpy as np

from .dynamics import DEFAULT_STEPS_PER_PERIOD, NoiseModel
from .gates_metrics import SingleQubitGateSpec, TwoQubitGateSpec
from .jc_model import JcParams
from .robustness import SCHEMES, ErrorInjection
from .single_qubit import DRIVE_MODELS, FRAMES, SingleQubitConfig
from .two_qubit import CoupledParams, TwoQubitConfig
from .pulses import ENVELOPE_KINDS

TWO_PI = 2 * np.pi
SINGLE_INITIAL = {"minus": (1.0, 0.0), "plus": (0.0, 1.0)}
TWO_INITIAL = {
    "pp": (1.0, 0.0, 0.0, 0.0),
    "pm": (0.0, 1.0, 0.0, 0.0),
    "mp": (0.0, 0.0, 1.0, 0.0),
    "mm": (0.0, 0.0, 0.0, 1.0),
    "uniform": (0.5, 0.5, 0.5, 0.5),
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key and, when known, its line."""


@dataclass
class PairSection:
    omega_q_ghz: float
    omega_c_ghz: float
    g_over_omega_q: float = 1 / 20


@dataclass
class TwoQubitSystemSection:
    left: PairSection = field(default_factory=lambda: PairSection(7.8, 7.8))
    right: PairSection = field(default_factory=lambda: PairSection(4.7, 4.7))
    j1_mhz: float = 5.0
    j2_mhz: float = 5.0


@dataclass
class SystemSection:
    omega_c_ghz: float = 8.0
    omega_q_ghz: float = 8.0
    g_over_omega_c: float = 1 / 20
    n_fock: int = 5
    two_qubit: TwoQubitSystemSection = field(default_factory=TwoQubitSystemSection)


@dataclass
class DriveSection:
    omega0_over_g: float = 1 / 20
    envelope: str = "square"
    dct: bool = True
    model: str = "polariton"


@dataclass
class NoiseSection:
    kappa_khz: float = 0.1
    gamma1_khz: float = 4.0
    gamma2_khz: float = 4.0


@dataclass
class GateSection:
    gamma_pi: float = 1.0
    theta_pi: float = 0.5
    phi_pi: float = 0.0
    initial: Any = "plus"
    delta: float = 0.0
    epsilon: float = 0.0


@dataclass
class TwoQubitGateSection:
    alpha_pi: float = 1.0
    vartheta_pi: float = 0.5
    phi_pi: float = 0.0
    initial: Any = "mm"


@dataclass
class SweepSection:
    axis: str = "z"
    min: float = -0.1
    max: float = 0.1
    points: int = 21
    schemes: list = field(default_factory=lambda: list(SCHEMES))
    gamma_pi: float = 1.0
    theta_pi: float = 0.25
    phi_pi: float = 0.0
    n_theta: int = 201
    n_phi: int = 11
    with_noise: bool = False
    gamma_khz: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 4.0, 8.0])


@dataclass
class IntegratorSection:
    steps_per_carrier_period: int = DEFAULT_STEPS_PER_PERIOD
    frame: str = "lab"
    samples: int = 201


@dataclass
class ExperimentConfig:
    system: SystemSection = field(default_factory=SystemSection)
    drive: DriveSection = field(default_factory=DriveSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    gate: GateSection = field(default_factory=GateSection)
    two_qubit_gate: TwoQubitGateSection = field(default_factory=TwoQubitGateSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    workers: int = 1

    # conversions to library objects

    def jc_params(self) -> JcParams:
        s = self.system
        wc = TWO_PI * s.omega_c_ghz * 1e9
        return JcParams(TWO_PI * s.omega_q_ghz * 1e9, wc, s.g_over_omega_c * wc, s.n_fock)

    def single_qubit_config(self) -> SingleQubitConfig:
        return SingleQubitConfig(
            params=self.jc_params(),
            omega0_over_g=self.drive.omega0_over_g,
            envelope=self.drive.envelope,
            dct=self.drive.dct,
            drive_model=self.drive.model,
            frame=self.integrator.frame,
            steps_per_period=self.integrator.steps_per_carrier_period,
            n_samples=self.integrator.samples,
        )

    def coupled_params(self) -> CoupledParams:
        tq = self.system.two_qubit

        def pair(p: PairSection) -> JcParams:
            wq = TWO_PI * p.omega_q_ghz * 1e9
            return JcParams(wq, TWO_PI * p.omega_c_ghz * 1e9, p.g_over_omega_q * wq, self.system.n_fock)

        return CoupledParams(pair(tq.left), pair(tq.right), TWO_PI * tq.j1_mhz * 1e6, TWO_PI * tq.j2_mhz * 1e6)

    def two_qubit_config(self) -> TwoQubitConfig:
        return TwoQubitConfig(
            params=self.coupled_params(),
            envelope=self.drive.envelope,
            frame=self.integrator.frame,
            steps_per_period=self.integrator.steps_per_carrier_period,
            n_samples=self.integrator.samples,
        )

    def noise_model(self) -> NoiseModel:
        n = self.noise
        return NoiseModel(TWO_PI * n.kappa_khz * 1e3, TWO_PI * n.gamma1_khz * 1e3, TWO_PI * n.gamma2_khz * 1e3)

    def gate_spec(self) -> SingleQubitGateSpec:
        g = self.gate
        return SingleQubitGateSpec.from_pi_units(g.gamma_pi, g.theta_pi, g.phi_pi)

    def sweep_spec(self) -> SingleQubitGateSpec:
        s = self.sweep
        return SingleQubitGateSpec.from_pi_units(s.gamma_pi, s.theta_pi, s.phi_pi)

    def two_qubit_spec(self) -> TwoQubitGateSpec:
        g = self.two_qubit_gate
        return TwoQubitGateSpec.from_pi_units(g.alpha_pi, g.vartheta_pi, g.phi_pi)

    def errors(self) -> ErrorInjection:
        return ErrorInjection(self.gate.delta, self.gate.epsilon)

    def initial_single(self) -> np.ndarray:
        return _initial(self.gate.initial, SINGLE_INITIAL, 2, "gate.initial")

    def initial_two(self) -> np.ndarray:
        return _initial(self.two_qubit_gate.initial, TWO_INITIAL, 4, "two_qubit_gate.initial")

    def sweep_fractions(self) -> np.ndarray:
        s = self.sweep
        return np.linspace(s.min, s.max, s.points)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _initial(value, named: dict, dim: int, key: str) -> np.ndarray:
    if isinstance(value, str):
        if value not in named:
            raise ConfigError(f"{key}: unknown state {value!r}; choose from {sorted(named)} or give {dim} amplitudes")
        return np.array(named[value], dtype=complex)
    try:
        vec = np.array([complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in value])
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"{key}: amplitudes must be numbers or [re, im] pairs") from None
    if vec.shape != (dim,) or np.linalg.norm(vec) == 0:
        raise ConfigError(f"{key}: expected {dim} amplitudes, not all zero")
    return vec / np.linalg.norm(vec)


# parsing

def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    if not m:
        return ""
    return f"line {text.count(chr(10), 0, m.start()) + 1}: "


def _coerce(value, default, path: str, text: str | None):
    anchor = _line_of(text, path.rsplit(".", 1)[-1])
    if path.endswith(".initial"):
        return value  # a state name or a list of amplitudes, checked in validate()
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{anchor}{path}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{anchor}{path}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{anchor}{path}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{anchor}{path}: expected a string, got {value!r}")
        return value
    if isinstance(default, list) and not isinstance(value, list):
        raise ConfigError(f"{anchor}{path}: expected a list, got {value!r}")
    return value


def _fill(cls_instance, data: dict, path: str, text: str | None):
    if not isinstance(data, dict):
        raise ConfigError(f"{_line_of(text, path.rsplit('.', 1)[-1])}{path}: expected an object")
    known = {f.name: f for f in fields(cls_instance)}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        if key not in known:
            raise ConfigError(f"{_line_of(text, key)}unknown key {sub!r}")
        current = getattr(cls_instance, key)
        if is_dataclass(current):
            _fill(current, value, sub, text)
        else:
            setattr(cls_instance, key, _coerce(value, current, sub, text))
    return cls_instance


def _check(cond: bool, text: str | None, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{_line_of(text, key.rsplit('.', 1)[-1])}{key}: {message}")


def validate(cfg: ExperimentConfig, text: str | None = None) -> ExperimentConfig:
    s, d, n, i, sw = cfg.system, cfg.drive, cfg.noise, cfg.integrator, cfg.sweep
    for key in ("omega_c_ghz", "omega_q_ghz", "g_over_omega_c"):
        _check(getattr(s, key) > 0, text, f"system.{key}", "must be positive")
    _check(s.n_fock >= 3, text, "system.n_fock", "must be >= 3")
    for side in ("left", "right"):
        p = getattr(s.two_qubit, side)
        for key in ("omega_q_ghz", "omega_c_ghz", "g_over_omega_q"):
            _check(getattr(p, key) > 0, text, f"system.two_qubit.{side}.{key}", "must be positive")
    _check(s.two_qubit.j1_mhz > 0 and s.two_qubit.j2_mhz > 0, text, "system.two_qubit.j1_mhz", "j1/j2 must be positive")
    _check(d.omega0_over_g > 0, text, "drive.omega0_over_g", "must be positive")
    _check(d.envelope in ENVELOPE_KINDS, text, "drive.envelope", f"must be one of {ENVELOPE_KINDS}")
    _check(d.model in DRIVE_MODELS, text, "drive.model", f"must be one of {DRIVE_MODELS}")
    for key in ("kappa_khz", "gamma1_khz", "gamma2_khz"):
        _check(getattr(n, key) >= 0, text, f"noise.{key}", "must be non-negative")
    _check(i.frame in FRAMES, text, "integrator.frame", f"must be one of {FRAMES}")
    _check(i.steps_per_carrier_period >= 50, text, "integrator.steps_per_carrier_period", "must be >= 50")
    _check(i.samples >= 2, text, "integrator.samples", "must be >= 2")
    _check(sw.axis in ("z", "x"), text, "sweep.axis", "must be 'z' or 'x'")
    _check(sw.points >= 2, text, "sweep.points", "must be >= 2")
    _check(sw.min < sw.max, text, "sweep.max", "must exceed sweep.min")
    _check(max(abs(sw.min), abs(sw.max)) <= 0.5, text, "sweep.max", "error fractions are limited to |x| <= 0.5")
    _check(set(sw.schemes) <= set(SCHEMES) and len(sw.schemes) > 0, text, "sweep.schemes", f"choose from {SCHEMES}")
    _check(sw.n_theta >= 2 and sw.n_phi >= 1, text, "sweep.n_theta", "grid needs n_theta >= 2 and n_phi >= 1")
    _check(all(isinstance(g, (int, float)) and g >= 0 for g in sw.gamma_khz) and len(sw.gamma_khz) > 0,
           text, "sweep.gamma_khz", "must be a non-empty list of non-negative numbers")
    _check(abs(cfg.gate.delta) <= 0.5 and abs(cfg.gate.epsilon) <= 0.5, text, "gate.delta", "|delta|, |epsilon| <= 0.5")
    _check(cfg.workers >= 1, text, "workers", "must be >= 1")
    cfg.initial_single()
    cfg.initial_two()
    return cfg


def from_dict(data: dict, text: str | None = None) -> ExperimentConfig:
    return validate(_fill(ExperimentConfig(), data, "", text), text)


def loads(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data, text)


def load(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return loads(text)
