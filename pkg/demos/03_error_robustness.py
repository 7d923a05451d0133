"""Robustness of the Hadamard gate to systematic Z and X errors.

Z error: the transmon frequency is off by Delta Omega0, i.e. an extra
Delta Omega0/2 sigma_z. Because the qubit lives in dressed states, the
polariton gate barely notices, while a gate on a bare transmon
({|0>, |1>} plus an auxiliary |e>) loses fidelity quickly.

X error: the drive amplitude is off by a factor (1 + epsilon). The six-segment
corrected sequence cancels this to leading order; the plain two-segment loop
does not. With decoherence on, the longer corrected sequence pays more
dephasing, so the two curves cross at a small epsilon.

The grid is thinned (21 x 5 input states) to keep the run short; the CLI sweeps
use the full grid.

Run: python demos/03_error_robustness.py
"""

from polariton_nhqc.gates_metrics import HADAMARD
from polariton_nhqc.robustness import sweep_error
from polariton_nhqc.single_qubit import REFERENCE_NOISE, SingleQubitConfig

GRID = dict(n_theta=21, n_phi=5)

z = sweep_error("z", [-0.1, -0.05, 0.0, 0.05, 0.1], spec=HADAMARD, **GRID)
print("Z error, square pulses, no decoherence")
print("  delta    " + "  ".join(f"{s:>21}" for s in z.fidelities))
for k, d in enumerate(z.fractions):
    print(f"  {d:+.3f}  " + "  ".join(f"{z.fidelities[s][k]:21.5f}" for s in z.fidelities))

cfg = SingleQubitConfig(envelope="sin2")
schemes = ["polariton-dct", "polariton-single-loop"]
for label, noise in (("no decoherence", None), ("reference decoherence", REFERENCE_NOISE)):
    x = sweep_error("x", [0.0, 0.025, 0.05, 0.075, 0.1], schemes, spec=HADAMARD, config=cfg, noise=noise, **GRID)
    print(f"\nX error, sin^2 pulses, {label}")
    print("  epsilon  corrected  single-loop")
    for k, e in enumerate(x.fractions):
        print(f"  {e:.3f}    {x.fidelities[schemes[0]][k]:.5f}    {x.fidelities[schemes[1]][k]:.5f}")
