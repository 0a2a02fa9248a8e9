"""Monte Carlo atom transits and the real-time detection trigger.

An atom falls through the resonator mode in ~5 us, three orders of
magnitude slower than the field decay, so every timebin sees a quasi-static
steady state at the instantaneous coupling g(t).  Detected counts are
Poisson draws per 200 ns bin; a sliding-window trigger watches the bus
stream and fires when enough counts arrive within 1.2 us, emulating the
real-time control system that reacts to an arriving atom.

Simulates 294 transits, aligns them by center of mass, and reports the
averaged signal width, the peak count rate, and the trigger efficiency.
"""

import os

import numpy as np

from atomswitch import SystemParams, build_space
from atomswitch.lindblad import TWO_PI
from atomswitch.transit import (
    TransitConfig,
    TriggerConfig,
    average_aligned,
    fwhm,
    peak_window_counts,
    simulate_transits,
    transmission_table,
    trigger_fraction,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

space = build_space(6)
base = SystemParams.from_mhz(kappa_i=4.8, kappa_bus=25.0, kappa_drop=20.0,
                             gamma=3.0, flux_in=17.5)
cfg = TransitConfig(g_peak=TWO_PI * 25.0, transit_sigma=2.55, flux_in=17.5,
                    detection_efficiency=0.72, timebin=0.2, duration=60.0,
                    rng_seed=2023, bus_floor=0.0066)
trig = TriggerConfig(threshold_counts=7, window=1.2, latency=0.16)

table = transmission_table(space, base, cfg.g_peak)
traces = simulate_transits(cfg, trig, base, 294, space=space, table=table)
avg = average_aligned(traces, cfg)

width = fwhm(avg.time_us, avg.t_bus)
peak = peak_window_counts(avg, cfg, trig.window)
frac = trigger_fraction(traces)
fired = [tr.trigger_times[0] for tr in traces if tr.trigger_times.size]
print(f"averaged bus signal FWHM : {width:.2f} us")
print(f"peak bus counts per {trig.window} us window: {peak:.2f} "
      f"(background ~{cfg.bus_floor * cfg.flux_in * cfg.detection_efficiency * trig.window:.2f})")
print(f"trigger fired on {frac:.1%} of transits, "
      f"median firing time {np.median(fired):.2f} us into the run")

csv = os.path.join(OUT, "demo_transit.csv")
np.savetxt(csv, np.column_stack([avg.time_us, avg.t_bus, avg.t_drop]),
           delimiter=",", header="time_us,t_bus,t_drop")
print(f"wrote {csv}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(avg.time_us, avg.t_bus, "C0", label="bus")
ax.plot(avg.time_us, avg.t_drop, "C3", label="bus-to-drop")
ax.set_xlim(-15, 15)
ax.set_xlabel("time from transit center (us)")
ax.set_ylabel("transmission")
ax.legend()
fig.tight_layout()
png = os.path.join(OUT, "demo_transit.png")
fig.savefig(png, dpi=150)
print(f"wrote {png}")
