"""A holonomic CNOT between two polariton qubits.

Two transmon-cavity pairs (2pi 7.8 GHz and 2pi 4.7 GHz) are joined by a
modulated cavity-cavity coupling J(t). Its two tones connect |--> and |-+> to
the ancillary state |2-, G> (two excitations in the left pair, none in the
right), so the control qubit in |-> sees a single-qubit holonomic rotation of
the target while |+> on the control is a spectator.

The rotation carries an extra geometric phase e^{-i alpha/2} on the controlled
block (a local phase on the control), so fidelities are measured against that
realised gate. This script runs the gate without and with decoherence and then
sweeps the transmon decoherence rate. The noisy runs take about a minute each.

Run: python demos/04_cnot.py [--sweep]
"""

import sys

import numpy as np

from polariton_nhqc.dynamics import NoiseModel
from polariton_nhqc.gates_metrics import CNOT
from polariton_nhqc.robustness import sweep_decoherence
from polariton_nhqc.two_qubit import build_problem, cnot_report, double_excitation_frequencies

TWO_PI = 2 * np.pi

problem = build_problem(CNOT)
w = double_excitation_frequencies(problem.config.params)
print(f"tones: omega'_-/2pi = {w.minus / TWO_PI / 1e9:.4f} GHz, omega'_+/2pi = {w.plus / TWO_PI / 1e9:.4f} GHz")
print(f"gate duration {problem.duration * 1e9:.2f} ns")

res = problem.run((0, 0, 0, 1), n_samples=9)
print("\n|--> -> |-+> trace")
print("  t [ns]  p_--    p_-+    p_anc   fidelity")
for k in range(len(res.times)):
    p = res.populations
    print(f"  {res.times[k] * 1e9:6.1f}  {p['p_mm'][k]:.4f}  {p['p_mp'][k]:.4f}  {p['p_ancilla'][k]:.4f}  {res.fidelity[k]:.4f}")

for label, noise in (("no decoherence", NoiseModel()),
                     ("kappa = 2pi 0.1 kHz, Gamma = 2pi 4 kHz", NoiseModel(TWO_PI * 100, TWO_PI * 4e3, TWO_PI * 4e3))):
    rep = cnot_report(problem.with_noise(noise))
    print(f"\n{label}: basis-state average {rep.basis_average:.5f}, product-grid average {rep.grid_average:.5f}, "
          f"Haar average {rep.haar_average:.5f}")

if "--sweep" in sys.argv:
    gammas = np.array([0.0, 1.0, 2.0, 4.0, 8.0])
    sweep = sweep_decoherence(TWO_PI * 1e3 * gammas)
    print("\nGamma/2pi [kHz]  CNOT fidelity")
    for g, f in zip(gammas, sweep.column("cnot")):
        print(f"  {g:5.1f}          {f:.5f}")
