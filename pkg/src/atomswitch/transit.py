"""Monte Carlo simulation of atom transits and the real-time trigger.

An atom falling through the evanescent field sees a time-dependent coupling
g(t) with a Gaussian envelope.  Because the transit (~5 us) is three orders
of magnitude slower than the resonator response (1/kappa ~ 3 ns), each
timebin is modeled quasi-statically: the master-equation steady state at
g(t_bin) sets the expected detected count rate, and Poisson counts are drawn
per bin with a seeded generator.  The trigger emulates a counting system
that watches the bus detector and fires once a sliding window holds enough
events.

Steady-state transmissions are precomputed on a g grid once per
configuration and interpolated per bin, which keeps a 294-transit batch
cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .hilbert import HilbertSpace, build_space
from .lindblad import SystemParams, transmissions

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TransitConfig:
    """One transit: coupling envelope, drive, detection and binning.

    ``bus_floor`` is the residual bus transmission of the critically coupled
    empty resonator (imperfect extinction plus dark counts); it reproduces
    the observed off-peak background rate.  ``detection_efficiency`` is the
    end-to-end probability that an output photon is detected.
    """

    g_peak: float                  # rad/us
    transit_sigma: float           # us, Gaussian width of g(t)
    flux_in: float                 # photons/us
    detection_efficiency: float
    timebin: float = 0.2           # us
    duration: float = 60.0         # us
    rng_seed: int = 0
    bus_floor: float = 0.0066      # transmission units

    def __post_init__(self):
        for name in ("transit_sigma", "flux_in", "detection_efficiency",
                     "timebin", "duration"):
            if getattr(self, name) <= 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if self.g_peak < 0 or self.bus_floor < 0:
            raise InvalidArgumentError("g_peak and bus_floor must be >= 0")
        if self.detection_efficiency > 1.0:
            raise InvalidArgumentError("detection_efficiency must be <= 1")


@dataclass(frozen=True)
class TriggerConfig:
    """Sliding-window threshold trigger on the bus detection stream."""

    threshold_counts: int = 7
    window: float = 1.2            # us
    latency: float = 0.16          # us

    def __post_init__(self):
        if self.threshold_counts < 1:
            raise InvalidArgumentError("threshold_counts must be >= 1")
        if self.window <= 0 or self.latency < 0:
            raise InvalidArgumentError("window must be > 0 and latency >= 0")


@dataclass(frozen=True)
class TransitTrace:
    """Binned detection record of one simulated transit."""

    bin_centers: np.ndarray        # us
    bus_counts: np.ndarray         # integer counts per bin
    drop_counts: np.ndarray
    trigger_times: np.ndarray      # us; empty if the trigger never fired


@dataclass(frozen=True)
class AveragedTrace:
    """Center-of-mass-aligned average of many transits, as transmissions."""

    time_us: np.ndarray            # bin centers relative to the aligned center
    t_bus: np.ndarray
    t_drop: np.ndarray
    coverage: np.ndarray           # traces contributing per bin
    n_traces: int


def g_profile(cfg: TransitConfig, t: float | np.ndarray):
    """Gaussian coupling envelope centered mid-run: g_peak exp(-(t-t0)^2/2s^2)."""
    t0 = 0.5 * cfg.duration
    z = (np.asarray(t, dtype=float) - t0) / cfg.transit_sigma
    return cfg.g_peak * np.exp(-0.5 * z * z)


@dataclass(frozen=True)
class TransmissionTable:
    """Steady-state port transmissions tabulated over coupling strength."""

    g_values: np.ndarray
    t_bus: np.ndarray
    t_drop: np.ndarray

    def lookup(self, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g = np.asarray(g, dtype=float)
        return (np.interp(g, self.g_values, self.t_bus),
                np.interp(g, self.g_values, self.t_drop))


def transmission_table(space: HilbertSpace, base_params: SystemParams,
                       g_max: float, n_points: int = 121) -> TransmissionTable:
    """Tabulate master-equation transmissions on g in [0, g_max].

    Saturation at the configured drive flux is included automatically since
    each entry is a full steady-state solve.
    """
    if g_max < 0 or n_points < 2:
        raise InvalidArgumentError("need g_max >= 0 and n_points >= 2")
    gs = np.linspace(0.0, max(g_max, 1e-12), n_points)
    t_bus = np.empty(n_points)
    t_drop = np.empty(n_points)
    for i, g in enumerate(gs):
        t_bus[i], t_drop[i], _ = transmissions(space, base_params.replace(g=float(g)))
    return TransmissionTable(g_values=gs, t_bus=t_bus, t_drop=t_drop)


def scan_trigger(event_times: np.ndarray, trigger: TriggerConfig) -> np.ndarray:
    """First firing time of the sliding-window trigger, plus latency.

    The window is evaluated at every detection event: the trigger fires at
    the first event t_i such that [t_i - window, t_i] contains at least
    ``threshold_counts`` events, and reports t_i + latency.  Returns an
    empty array when no window qualifies.
    """
    t = np.sort(np.asarray(event_times, dtype=float))
    j = 0
    for i in range(t.size):
        while t[i] - t[j] > trigger.window:
            j += 1
        if i - j + 1 >= trigger.threshold_counts:
            return np.array([t[i] + trigger.latency])
    return np.empty(0)


def _bin_grid(cfg: TransitConfig) -> np.ndarray:
    n_bins = int(round(cfg.duration / cfg.timebin))
    if n_bins < 1:
        raise InvalidArgumentError("duration shorter than one timebin")
    return (np.arange(n_bins) + 0.5) * cfg.timebin


def expected_rates(cfg: TransitConfig, table: TransmissionTable) -> tuple[np.ndarray, np.ndarray]:
    """Detected count rates (per us) on both ports for every timebin."""
    centers = _bin_grid(cfg)
    t_bus, t_drop = table.lookup(g_profile(cfg, centers))
    scale = cfg.flux_in * cfg.detection_efficiency
    return (t_bus + cfg.bus_floor) * scale, t_drop * scale


def simulate_transit(cfg: TransitConfig, trigger: TriggerConfig,
                     table: TransmissionTable, *,
                     rng: np.random.Generator | None = None) -> TransitTrace:
    """Simulate one transit; identical config and seed give identical output."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    centers = _bin_grid(cfg)
    bus_rate, drop_rate = expected_rates(cfg, table)
    bus_counts = rng.poisson(bus_rate * cfg.timebin)
    drop_counts = rng.poisson(drop_rate * cfg.timebin)
    # event-driven trigger: scatter each bin's counts uniformly inside it
    total = int(bus_counts.sum())
    lefts = np.repeat(centers - 0.5 * cfg.timebin, bus_counts)
    event_times = lefts + cfg.timebin * rng.random(total)
    triggers = scan_trigger(event_times, trigger)
    return TransitTrace(bin_centers=centers, bus_counts=bus_counts,
                        drop_counts=drop_counts, trigger_times=triggers)


def simulate_transits(cfg: TransitConfig, trigger: TriggerConfig,
                      base_params: SystemParams, n_transits: int, *,
                      space: HilbertSpace | None = None,
                      table: TransmissionTable | None = None,
                      n_max: int = 4) -> list[TransitTrace]:
    """Independent transits with derived seeds rng_seed + index.

    Transits are statistically independent given the derived seeds, so the
    batch may be computed in any order or in parallel without changing the
    result.
    """
    if n_transits < 1:
        raise InvalidArgumentError("n_transits must be >= 1")
    if space is None:
        space = build_space(n_max)
    if table is None:
        params = base_params.replace(g=0.0, flux_in=cfg.flux_in,
                                     delta_rl=0.0, delta_al=0.0)
        table = transmission_table(space, params, cfg.g_peak)
    out = []
    for k in range(n_transits):
        rng = np.random.default_rng(cfg.rng_seed + k)
        out.append(simulate_transit(cfg, trigger, table, rng=rng))
    return out


def _center_of_mass(trace: TransitTrace, cfg: TransitConfig) -> float:
    """COM of the background-subtracted bus signal; run center if no signal."""
    bg = cfg.bus_floor * cfg.flux_in * cfg.detection_efficiency * cfg.timebin
    m = np.clip(trace.bus_counts - bg, 0.0, None)
    if m.sum() <= 0:
        return 0.5 * cfg.duration
    return float(np.sum(m * trace.bin_centers) / m.sum())


def average_aligned(traces: list[TransitTrace], cfg: TransitConfig) -> AveragedTrace:
    """Align each trace to its bus-signal center of mass, average, normalize.

    Alignment shifts are rounded to whole bins; bins that lose coverage near
    the edges are averaged over the traces that still cover them.  Counts
    are converted to transmissions with the configured flux, detection
    efficiency and bin width.
    """
    if len(traces) == 0:
        raise InvalidArgumentError("no traces to average")
    n_bins = traces[0].bin_centers.size
    for tr in traces:
        if tr.bin_centers.size != n_bins:
            raise InvalidArgumentError("traces do not share a common binning")
    mid = 0.5 * cfg.duration
    acc_bus = np.zeros(n_bins)
    acc_drop = np.zeros(n_bins)
    coverage = np.zeros(n_bins)
    for tr in traces:
        shift = int(round((_center_of_mass(tr, cfg) - mid) / cfg.timebin))
        src_lo, src_hi = max(0, shift), min(n_bins, n_bins + shift)
        dst_lo, dst_hi = max(0, -shift), min(n_bins, n_bins - shift)
        acc_bus[dst_lo:dst_hi] += tr.bus_counts[src_lo:src_hi]
        acc_drop[dst_lo:dst_hi] += tr.drop_counts[src_lo:src_hi]
        coverage[dst_lo:dst_hi] += 1.0
    norm = cfg.flux_in * cfg.detection_efficiency * cfg.timebin
    covered = coverage > 0
    t_bus = np.zeros(n_bins)
    t_drop = np.zeros(n_bins)
    t_bus[covered] = acc_bus[covered] / (coverage[covered] * norm)
    t_drop[covered] = acc_drop[covered] / (coverage[covered] * norm)
    return AveragedTrace(time_us=traces[0].bin_centers - mid, t_bus=t_bus,
                         t_drop=t_drop, coverage=coverage,
                         n_traces=len(traces))


def fwhm(time_us: np.ndarray, signal: np.ndarray,
         baseline: float | None = None) -> float:
    """Full width at half maximum above baseline, by linear interpolation.

    The baseline defaults to the mean of the outer 10% of bins on each side.
    """
    time_us = np.asarray(time_us, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if time_us.size != signal.size or time_us.size < 5:
        raise InvalidArgumentError("need matching arrays with >= 5 points")
    if baseline is None:
        k = max(1, time_us.size // 10)
        baseline = 0.5 * (signal[:k].mean() + signal[-k:].mean())
    peak_idx = int(np.argmax(signal))
    half = baseline + 0.5 * (signal[peak_idx] - baseline)
    above = signal >= half

    def _cross(i_out, i_in):
        f = (half - signal[i_out]) / (signal[i_in] - signal[i_out])
        return time_us[i_out] + f * (time_us[i_in] - time_us[i_out])

    left = peak_idx
    while left > 0 and above[left - 1]:
        left -= 1
    right = peak_idx
    while right < signal.size - 1 and above[right + 1]:
        right += 1
    t_left = _cross(left - 1, left) if left > 0 else time_us[0]
    t_right = _cross(right + 1, right) if right < signal.size - 1 else time_us[-1]
    return float(t_right - t_left)


def peak_window_counts(avg: AveragedTrace, cfg: TransitConfig,
                       window: float) -> float:
    """Maximum expected detected bus counts inside one sliding window."""
    rate = avg.t_bus * cfg.flux_in * cfg.detection_efficiency   # per us
    w_bins = max(1, int(round(window / cfg.timebin)))
    sliding = np.convolve(rate, np.ones(w_bins), mode="valid") * cfg.timebin
    return float(sliding.max())


def trigger_fraction(traces: list[TransitTrace]) -> float:
    """Fraction of transits on which the trigger fired at least once."""
    if len(traces) == 0:
        raise InvalidArgumentError("no traces")
    return sum(tr.trigger_times.size > 0 for tr in traces) / len(traces)
