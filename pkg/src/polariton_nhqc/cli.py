"""Command-line front end: gate runs, sweeps and the validation suite, with CSV output.

Exit status: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import replace

import numpy as np

from . import __version__, config as config_mod
from .config import ConfigError, ExperimentConfig
from .dynamics import DivergenceError, IntegrationAccuracyError, ResolutionError, SimResult
from .jc_model import DegeneracyError, dressed_spectrum, noise_energy_shifts, transition_frequencies
from .robustness import SweepResult, sweep_decoherence, sweep_error, with_errors
from . import single_qubit, two_qubit

TWO_PI = 2 * np.pi
TRACE_COLUMNS = ("time_ns", "p_G", "p_minus", "p_plus", "leakage", "fidelity")
TWO_QUBIT_COLUMNS = TRACE_COLUMNS + ("p_pp", "p_pm", "p_mp", "p_mm", "p_ancilla")
NUMERICAL_ERRORS = (ResolutionError, DivergenceError, IntegrationAccuracyError, DegeneracyError,
                    FloatingPointError, np.linalg.LinAlgError)
SUBCOMMANDS = ("spectrum", "gate", "two-qubit", "sweep-z", "sweep-x", "sweep-decoherence", "validate")


class NumericalFailure(RuntimeError):
    pass


# CSV

def _fmt(x) -> str:
    return repr(float(x))


def write_rows(header, rows, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def trace_rows(result: SimResult, columns=TRACE_COLUMNS):
    data = {"time_ns": result.times * 1e9, "leakage": result.leakage, "fidelity": result.fidelity,
            **result.populations}
    return [[data[c][k] for c in columns] for k in range(len(result.times))]


def emit_trace(result: SimResult, out, two: bool = False) -> None:
    cols = TWO_QUBIT_COLUMNS if two else TRACE_COLUMNS
    write_rows(cols, trace_rows(result, cols), out)


def emit_sweep(result: SweepResult, out, first: str = "fraction", scale: float = 1.0) -> None:
    schemes = list(result.fidelities)
    rows = [[f * scale] + [result.fidelities[s][k] for s in schemes] for k, f in enumerate(result.fractions)]
    write_rows([first] + schemes, rows, out)


@contextmanager
def _sink(path: str | None):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write output {path!r}: {exc.strerror}") from None
    with fh:
        yield fh


def _report(args) -> io.TextIOBase:
    """Human-readable summaries go to stdout, or stderr when CSV is streamed to stdout."""
    return sys.stdout if args.output else sys.stderr


@contextmanager
def _executor(workers: int):
    if workers <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        yield ex


# subcommands

def cmd_spectrum(cfg: ExperimentConfig, args) -> int:
    params = cfg.jc_params()
    basis = dressed_spectrum(params)
    w = transition_frequencies(basis)
    rep = _report(args)
    energies = basis.eigenvalues() - basis.ground_energy
    print(f"JC model: omega_c/2pi = {params.omega_c / TWO_PI / 1e9:.6g} GHz, omega_q/2pi = "
          f"{params.omega_q / TWO_PI / 1e9:.6g} GHz, g/2pi = {params.g / TWO_PI / 1e9:.6g} GHz", file=rep)
    print("dressed energies (E - E_G)/2pi [GHz]: " + ", ".join(f"{e / TWO_PI / 1e9:.9f}" for e in energies[:7]),
          file=rep)
    print(f"transition frequencies /2pi [GHz]: omega_- = {w.minus / TWO_PI / 1e9:.9f}, "
          f"omega_+ = {w.plus / TWO_PI / 1e9:.9f}", file=rep)
    rows = []
    for axis, scale in (("x", params.omega_q), ("z", params.g)):
        for frac in np.geomspace(1e-3, 1e-2, 5):
            s = noise_energy_shifts(params, frac * scale, axis)
            rows.append([0.0 if axis == "x" else 1.0, frac, frac * scale, *s])
    header = ["axis_is_z", "h_over_scale", "h_rad_s", "exact_minus_rad_s", "exact_plus_rad_s",
              "approx_minus_rad_s", "approx_plus_rad_s"]
    print("noise shifts (x scale omega_q, z scale g):", file=rep)
    with _sink(args.output) as out:
        write_rows(header, rows, out)
    return 0


def cmd_gate(cfg: ExperimentConfig, args) -> int:
    problem = single_qubit.build_problem(cfg.gate_spec(), cfg.single_qubit_config(), cfg.noise_model())
    problem = with_errors(problem, cfg.errors())
    result = problem.run(cfg.initial_single())
    _check_drift(result)
    with _sink(args.output) as out:
        emit_trace(result, out)
    rep = _report(args)
    print(f"gate duration {problem.duration * 1e9:.3f} ns, final state fidelity {result.fidelity[-1]:.6f}, "
          f"final p_G {result.populations['p_G'][-1]:.3e}, drift {result.drift:.2e}", file=rep)
    return 0


def cmd_two_qubit(cfg: ExperimentConfig, args) -> int:
    problem = two_qubit.build_problem(cfg.two_qubit_spec(), cfg.two_qubit_config(), cfg.noise_model())
    result = problem.run(cfg.initial_two())
    _check_drift(result)
    with _sink(args.output) as out:
        emit_trace(result, out, two=True)
    report = two_qubit.cnot_report(problem)
    rep = _report(args)
    print(f"gate duration {problem.duration * 1e9:.3f} ns, final state fidelity {result.fidelity[-1]:.6f}", file=rep)
    print(f"basis-state average {report.basis_average:.6f}, grid average {report.grid_average:.6f}, "
          f"Haar average {report.haar_average:.6f}", file=rep)
    return 0


def _sweep(axis: str, cfg: ExperimentConfig, args) -> int:
    s = cfg.sweep
    noise = cfg.noise_model() if s.with_noise else None
    with _executor(cfg.workers) as ex:
        result = sweep_error(axis, cfg.sweep_fractions(), s.schemes, cfg.sweep_spec(), noise,
                             cfg.single_qubit_config(), ex, s.n_theta, s.n_phi)
    with _sink(args.output) as out:
        emit_sweep(result, out)
    return 0


def cmd_sweep_decoherence(cfg: ExperimentConfig, args) -> int:
    gammas = TWO_PI * 1e3 * np.asarray(cfg.sweep.gamma_khz, dtype=float)
    with _executor(cfg.workers) as ex:
        result = sweep_decoherence(gammas, cfg.two_qubit_spec(), cfg.two_qubit_config(),
                                   kappa=TWO_PI * 1e3 * cfg.noise.kappa_khz, executor=ex)
    with _sink(args.output) as out:
        emit_sweep(result, out, first="gamma_khz", scale=1 / (TWO_PI * 1e3))
    return 0


def cmd_validate(cfg: ExperimentConfig, args) -> int:
    from .validation import run_validation

    results = run_validation()
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 2


def _check_drift(result: SimResult) -> None:
    if not np.all(np.isfinite(result.fidelity)):
        raise NumericalFailure("non-finite values in the simulated trace")


COMMANDS = {
    "spectrum": cmd_spectrum,
    "gate": cmd_gate,
    "two-qubit": cmd_two_qubit,
    "sweep-z": lambda c, a: _sweep("z", c, a),
    "sweep-x": lambda c, a: _sweep("x", c, a),
    "sweep-decoherence": cmd_sweep_decoherence,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polariton-nhqc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--config", help="JSON experiment configuration (defaults to the built-in parameter set)")
    p.add_argument("--output", help="CSV output path (default: stdout)")
    p.add_argument("--frame", choices=("lab", "rotating"), help="override integrator.frame")
    p.add_argument("--dct", choices=("on", "off"), help="override drive.dct")
    p.add_argument("--workers", type=int, help="override the number of worker processes for sweeps")
    p.add_argument("--print-effective-config", action="store_true",
                   help="print the defaults-filled configuration as JSON and exit")
    return p


def effective_config(args) -> ExperimentConfig:
    cfg = config_mod.load(args.config) if args.config else ExperimentConfig()
    if args.frame:
        cfg.integrator = replace(cfg.integrator, frame=args.frame)
    if args.dct:
        cfg.drive = replace(cfg.drive, dct=args.dct == "on")
    if args.workers is not None:
        cfg.workers = args.workers
    return config_mod.validate(cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        if args.print_effective_config:
            sys.stdout.write(cfg.to_json())
            return 0
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, *NUMERICAL_ERRORS) as exc:
        print(f"numerical failure in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # invalid combinations that only the physics layer can detect
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
