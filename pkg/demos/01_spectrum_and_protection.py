"""Dressed polariton levels and why they resist transmon noise.

A resonant transmon-cavity pair (omega_c = omega_q = 2pi 8 GHz, g = omega_c/20)
splits its single-excitation manifold into |1,-> and |1,+>, 2g apart. These two
dressed states form the qubit. A static noise term h sigma_x or h sigma_z on the
transmon only shifts them at second order in h, which is the protection the
scheme relies on. This script prints the spectrum and fits the power law.

Run: python demos/01_spectrum_and_protection.py
"""

import numpy as np

from polariton_nhqc.jc_model import (
    JcParams,
    approximate_noise_shifts,
    dressed_spectrum,
    noise_energy_shifts,
    transition_frequencies,
)

TWO_PI = 2 * np.pi

params = JcParams.resonant(TWO_PI * 8e9)
basis = dressed_spectrum(params)
w = transition_frequencies(basis)
print(f"g/2pi = {params.g / TWO_PI / 1e9:.3f} GHz")
print(f"omega_-/2pi = {w.minus / TWO_PI / 1e9:.6f} GHz, omega_+/2pi = {w.plus / TWO_PI / 1e9:.6f} GHz")
for n in (1, 2, 3):
    lo, hi = basis.energies[n]
    print(f"n={n}: splitting/2pi = {(hi - lo) / TWO_PI / 1e9:.6f} GHz  (2 g sqrt(n) = {2 * params.g * np.sqrt(n) / TWO_PI / 1e9:.6f})")

# energy shifts of |1,-+> under a static transmon perturbation
for axis, scale, name in (("x", params.omega_q, "omega_q"), ("z", params.g, "g")):
    hs = np.geomspace(1e-3, 1e-2, 7) * scale
    exact = np.array([noise_energy_shifts(params, h, axis)[:2] for h in hs])
    print(f"\nh sigma_{axis}, h from 1e-3 to 1e-2 {name}")
    print("  h/scale     shift(1,-) [Hz]   shift(1,+) [Hz]   second-order estimate [Hz]")
    for h, (sm, sp) in zip(hs, exact):
        approx = approximate_noise_shifts(params, h, axis)
        print(f"  {h / scale:.2e}  {sm / TWO_PI:+14.2f}  {sp / TWO_PI:+14.2f}  {approx[0] / TWO_PI:+14.2f} / {approx[1] / TWO_PI:+.2f}")
    slopes = [np.polyfit(np.log(hs), np.log(np.abs(exact[:, k])), 1)[0] for k in range(2)]
    print(f"  log-log slopes: {slopes[0]:.3f}, {slopes[1]:.3f} (2 = second-order protection)")
