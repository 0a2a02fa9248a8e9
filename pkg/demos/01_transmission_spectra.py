"""Transmission spectra of the four-port switch.

Three cases on the same detuning axis:

  * empty resonator at critical coupling: the bus port goes dark on
    resonance and ~80% of the light crosses into the drop fiber (ON state),
  * one atom at fixed coupling g: vacuum-Rabi splitting pushes the drop
    transmission into two side peaks and restores the bus transmission at
    zero detuning (OFF state),
  * the motional ensemble: a Gaussian spread of coupling strengths, which
    is what an untrapped falling atom actually produces.

Writes demo_spectra.csv and (if matplotlib is installed) demo_spectra.png
into demos/output/.
"""

import os

import numpy as np

from atomswitch import (
    GDistribution,
    SystemParams,
    build_space,
    critical_kappa_bus,
    CouplerConfig,
    ensemble_spectrum,
    gaussian_weights,
    g_grid,
    spectra_by_g,
    spectrum,
)
from atomswitch.lindblad import TWO_PI

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# reference resonator: intrinsic loss 4.8 MHz, drop coupler 20 MHz, bus
# coupler solved for critical coupling (backscattering 1.7 MHz included)
kb_mhz = critical_kappa_bus(CouplerConfig(TWO_PI * 4.8, TWO_PI * 20.0,
                                          TWO_PI * 1.7)) / TWO_PI
print(f"critical bus coupling: {kb_mhz:.3f} MHz")

space = build_space(4)
params = SystemParams.from_mhz(kappa_i=4.8, kappa_bus=kb_mhz, kappa_drop=20.0,
                               gamma=3.0, g=15.6, flux_in=0.01)
detuning = np.linspace(-40.0, 40.0, 161)

empty = spectrum(space, params.replace(g=0.0), detuning)
single = spectrum(space, params, detuning)

dist = GDistribution.from_mhz(g_mean=15.6, g_sigma=9.0)
table = spectra_by_g(space, params, g_grid(dist), detuning)
ens = ensemble_spectrum(table, gaussian_weights(dist))

i0 = np.abs(detuning).argmin()
print("on resonance:")
print(f"  empty    : T_bus = {empty.t_bus[i0]:.4f}  T_drop = {empty.t_drop[i0]:.4f}")
print(f"  single g : T_bus = {single.t_bus[i0]:.4f}  T_drop = {single.t_drop[i0]:.4f}")
print(f"  ensemble : T_bus = {ens.t_bus[i0]:.4f}  T_drop = {ens.t_drop[i0]:.4f}")

rows = np.column_stack([detuning, empty.t_bus, empty.t_drop, single.t_bus,
                        single.t_drop, ens.t_bus, ens.t_drop])
csv = os.path.join(OUT, "demo_spectra.csv")
np.savetxt(csv, rows, delimiter=",", header=(
    "detuning_mhz,empty_bus,empty_drop,single_bus,single_drop,"
    "ensemble_bus,ensemble_drop"))
print(f"wrote {csv}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, (ax_d, ax_b) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
ax_d.plot(detuning, empty.t_drop, "0.6", label="no atom")
ax_d.plot(detuning, single.t_drop, "C3--", label="single g = 15.6 MHz")
ax_d.plot(detuning, ens.t_drop, "C3", label="ensemble (15.6 +- 9 MHz)")
ax_d.set_ylabel("bus-to-drop transmission")
ax_d.legend()
ax_b.plot(detuning, empty.t_bus, "0.6")
ax_b.plot(detuning, single.t_bus, "C0--")
ax_b.plot(detuning, ens.t_bus, "C0")
ax_b.set_ylabel("bus transmission")
ax_b.set_xlabel("resonator-laser detuning (MHz)")
fig.tight_layout()
png = os.path.join(OUT, "demo_spectra.png")
fig.savefig(png, dpi=150)
print(f"wrote {png}")
