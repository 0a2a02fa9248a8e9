"""Run configuration: line-oriented config files, presets, validation.

Config files are plain text with ``[section]`` headers and ``key = value``
pairs; ``#`` starts a comment.  Keys carry their unit in the name
(``kappa_i_mhz``, ``timebin_us``); frequencies are ordinary frequencies
nu = omega/2pi in MHz and are converted to angular rad/us exactly once, at
this boundary.  Resolution order: built-in defaults, then a named preset,
then the config file, then command-line overrides; validation runs on the
fully merged result before anything is computed.

``kappa_bus_mhz = critical`` solves the critical-coupling condition from
(kappa_i, kappa_drop, h).  ``n_max = auto`` picks 4 for weak drive
(flux <= 0.1 photons/us) and 6 above, which keeps the n_max -> n_max + 2
truncation shift of every observable below 1e-6 relative over the supported
drive range.
"""

from __future__ import annotations

import copy

import numpy as np

from .analytics import CouplerConfig, critical_kappa_bus
from .ensemble import GDistribution
from .errors import ConfigError
from .lindblad import SystemParams, TWO_PI
from .transit import TransitConfig, TriggerConfig

DEFAULTS: dict[str, dict] = {
    "system": {
        "kappa_i_mhz": 4.8,
        "kappa_bus_mhz": "critical",
        "kappa_drop_mhz": 20.0,
        "h_mhz": 1.7,
        "gamma_mhz": 3.0,          # dipole-amplitude decay; not measured in-situ
        "g_mhz": 15.6,
        "flux_in_per_us": 0.01,    # weak drive isolates the linear response
    },
    "ensemble": {
        "g_mean_mhz": 15.6,
        "g_sigma_mhz": 9.0,
        "g_grid_min_mhz": 7.5,
        "g_grid_max_mhz": 30.0,
        "g_grid_points": 46,
    },
    "scan": {
        "detuning_min_mhz": -40.0,
        "detuning_max_mhz": 40.0,
        "detuning_points": 81,
    },
    "spectrum": {
        "mode": "ensemble",        # ensemble | single | empty
    },
    "g2": {
        "flux_in_per_us": 17.5,    # matches the measurement drive range
        "tau_max_us": 0.25,
        "tau_points": 126,
        "mode": "ensemble",        # ensemble | single | empty
    },
    "metrics": {
        "flux_in_per_us": 17.5,    # throughput figures at measurement drive
        "linear_flux_in_per_us": 0.01,   # entangled-state amplitudes stay weak-drive
        "bus_floor": 0.03,         # residual ON-state bus transmission for contrast
    },
    "sweep": {
        "kappa_drop_min_mhz": 5.0,
        "kappa_drop_max_mhz": 35.0,
        "kappa_drop_points": 31,
        "flux_in_per_us": 0.01,
    },
    "project": {
        "quality_factor_ratio": 5.0,
        "g_mhz": 30.0,
        "kappa_drop_mhz": 20.0,
        "flux_in_per_us": 0.01,
    },
    "transit": {
        "g_peak_mhz": 25.0,
        "transit_sigma_us": 2.55,  # calibrated: averaged bus signal FWHM ~ 5 us
        "duration_us": 60.0,
        "timebin_us": 0.2,
        "flux_in_per_us": 17.5,
        "detection_efficiency": 0.72,  # calibrated: ~7 detected bus counts per
                                       # 1.2 us window at the transit peak
        "bus_floor": 0.0066,       # reproduces ~0.1 background counts per 1.2 us
        "n_transits": 294,
    },
    "trigger": {
        "threshold_counts": 7,
        "window_us": 1.2,
        "latency_us": 0.16,
    },
    "fit": {
        "restarts": 3,
        "max_iterations": 2000,
    },
    "run": {
        "n_max": "auto",
        "seed": 12345,
        "workers": 1,
    },
}

#: Built-in presets.  paper-fig3 is the spectroscopy configuration (ensemble
#: spectra and correlation functions at the reference coupler setting);
#: paper-fig4 is the coupler sweep with figures of merit.
PRESETS: dict[str, dict[str, dict]] = {
    "paper-fig3": {
        "system": {"kappa_i_mhz": 4.8, "kappa_bus_mhz": "critical",
                   "kappa_drop_mhz": 20.0, "h_mhz": 1.7, "gamma_mhz": 3.0},
        "ensemble": {"g_mean_mhz": 15.6, "g_sigma_mhz": 9.0,
                     "g_grid_min_mhz": 7.5, "g_grid_max_mhz": 30.0,
                     "g_grid_points": 46},
        "scan": {"detuning_min_mhz": -40.0, "detuning_max_mhz": 40.0,
                 "detuning_points": 81},
        "spectrum": {"mode": "ensemble"},
    },
    "paper-fig4": {
        "system": {"kappa_i_mhz": 4.8, "kappa_bus_mhz": "critical",
                   "h_mhz": 1.7, "gamma_mhz": 3.0},
        "sweep": {"kappa_drop_min_mhz": 5.0, "kappa_drop_max_mhz": 35.0,
                  "kappa_drop_points": 31, "flux_in_per_us": 0.01},
    },
}

_INT_KEYS = {"g_grid_points", "detuning_points", "tau_points",
             "kappa_drop_points", "n_transits", "threshold_counts",
             "restarts", "max_iterations", "seed", "workers", "n_max"}
_STR_KEYS = {"mode"}


def _coerce(section: str, key: str, raw: str):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if key == "kappa_bus_mhz" and raw == "critical":
        return raw
    if key == "n_max" and raw == "auto":
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def parse_config_text(text: str) -> dict[str, dict]:
    """Parse the line-oriented format into a nested dict (no validation)."""
    out: dict[str, dict] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in DEFAULTS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            out.setdefault(section, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {stripped!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in DEFAULTS[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        out[section][key] = _coerce(section, key, raw)
    return out


def load_config_file(path) -> dict[str, dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def _merge(base: dict[str, dict], overlay: dict[str, dict]) -> None:
    for section, values in overlay.items():
        if section not in base:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in values.items():
            if key not in base[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            base[section][key] = value


class RunConfig:
    """Fully resolved and validated configuration for one CLI run."""

    def __init__(self, values: dict[str, dict]):
        self.values = values
        self._validate()

    # -- construction -----------------------------------------------------

    @classmethod
    def resolve(cls, preset: str | None = None, path=None,
                overrides: dict[str, dict] | None = None) -> "RunConfig":
        values = copy.deepcopy(DEFAULTS)
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(
                    f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
            _merge(values, PRESETS[preset])
        if path is not None:
            _merge(values, load_config_file(path))
        if overrides:
            _merge(values, overrides)
        return cls(values)

    def _validate(self) -> None:
        v = self.values
        sys_ = v["system"]
        for key in ("kappa_i_mhz", "kappa_drop_mhz", "h_mhz", "gamma_mhz", "g_mhz"):
            if not isinstance(sys_[key], (int, float)) or sys_[key] < 0:
                raise ConfigError(f"[system] {key} must be a number >= 0")
        kb = sys_["kappa_bus_mhz"]
        if kb != "critical" and (not isinstance(kb, (int, float)) or kb < 0):
            raise ConfigError("[system] kappa_bus_mhz must be >= 0 or 'critical'")
        for section, key in (("system", "flux_in_per_us"),
                             ("g2", "flux_in_per_us"),
                             ("metrics", "flux_in_per_us"),
                             ("metrics", "linear_flux_in_per_us"),
                             ("sweep", "flux_in_per_us"),
                             ("project", "flux_in_per_us"),
                             ("transit", "flux_in_per_us")):
            if v[section][key] <= 0:
                raise ConfigError(f"[{section}] {key} must be > 0")
        ens = v["ensemble"]
        if ens["g_sigma_mhz"] <= 0:
            raise ConfigError("[ensemble] g_sigma_mhz must be > 0")
        if not ens["g_grid_min_mhz"] < ens["g_grid_max_mhz"]:
            raise ConfigError("[ensemble] g_grid_min_mhz must be < g_grid_max_mhz")
        if ens["g_grid_points"] < 2:
            raise ConfigError("[ensemble] g_grid_points must be >= 2")
        scan = v["scan"]
        if scan["detuning_points"] < 1:
            raise ConfigError("[scan] detuning_points must be >= 1")
        if scan["detuning_min_mhz"] > scan["detuning_max_mhz"]:
            raise ConfigError("[scan] detuning_min_mhz must be <= detuning_max_mhz")
        if v["spectrum"]["mode"] not in ("ensemble", "single", "empty"):
            raise ConfigError("[spectrum] mode must be ensemble, single or empty")
        if v["g2"]["mode"] not in ("ensemble", "single", "empty"):
            raise ConfigError("[g2] mode must be ensemble, single or empty")
        if v["g2"]["tau_points"] < 2 or v["g2"]["tau_max_us"] <= 0:
            raise ConfigError("[g2] needs tau_points >= 2 and tau_max_us > 0")
        sweep = v["sweep"]
        if sweep["kappa_drop_points"] < 1 or sweep["kappa_drop_min_mhz"] <= 0:
            raise ConfigError("[sweep] needs kappa_drop_points >= 1 and a positive grid")
        if sweep["kappa_drop_min_mhz"] > sweep["kappa_drop_max_mhz"]:
            raise ConfigError("[sweep] kappa_drop_min_mhz must be <= kappa_drop_max_mhz")
        if v["project"]["quality_factor_ratio"] <= 0:
            raise ConfigError("[project] quality_factor_ratio must be > 0")
        n_max = v["run"]["n_max"]
        if n_max != "auto" and (not isinstance(n_max, int) or n_max < 1):
            raise ConfigError("[run] n_max must be an integer >= 1 or 'auto'")
        if v["run"]["workers"] < 1:
            raise ConfigError("[run] workers must be >= 1")
        tr = v["transit"]
        for key in ("g_peak_mhz",):
            if tr[key] < 0:
                raise ConfigError(f"[transit] {key} must be >= 0")
        for key in ("transit_sigma_us", "duration_us", "timebin_us",
                    "detection_efficiency"):
            if tr[key] <= 0:
                raise ConfigError(f"[transit] {key} must be > 0")
        if tr["detection_efficiency"] > 1.0:
            raise ConfigError("[transit] detection_efficiency must be <= 1")
        if tr["n_transits"] < 1:
            raise ConfigError("[transit] n_transits must be >= 1")
        trg = v["trigger"]
        if trg["threshold_counts"] < 1 or trg["window_us"] <= 0 or trg["latency_us"] < 0:
            raise ConfigError("[trigger] invalid trigger settings")

    # -- typed accessors ---------------------------------------------------

    def get(self, section: str, key: str):
        return self.values[section][key]

    def kappa_bus_mhz(self) -> float:
        kb = self.get("system", "kappa_bus_mhz")
        if kb == "critical":
            cfg = CouplerConfig(
                kappa_i=TWO_PI * self.get("system", "kappa_i_mhz"),
                kappa_drop=TWO_PI * self.get("system", "kappa_drop_mhz"),
                h=TWO_PI * self.get("system", "h_mhz"))
            return critical_kappa_bus(cfg) / TWO_PI
        return float(kb)

    def n_max(self, flux_in: float) -> int:
        n = self.get("run", "n_max")
        if n == "auto":
            return 4 if flux_in <= 0.1 else 6
        return int(n)

    def system_params(self, *, flux_in: float | None = None,
                      g_mhz: float | None = None,
                      no_atom: bool = False) -> SystemParams:
        if flux_in is None:
            flux_in = self.get("system", "flux_in_per_us")
        if g_mhz is None:
            g_mhz = self.get("system", "g_mhz")
        if no_atom:
            g_mhz = 0.0
        return SystemParams.from_mhz(
            kappa_i=self.get("system", "kappa_i_mhz"),
            kappa_bus=self.kappa_bus_mhz(),
            kappa_drop=self.get("system", "kappa_drop_mhz"),
            gamma=self.get("system", "gamma_mhz"),
            g=g_mhz,
            flux_in=flux_in)

    def g_distribution(self) -> GDistribution:
        return GDistribution.from_mhz(
            g_mean=self.get("ensemble", "g_mean_mhz"),
            g_sigma=self.get("ensemble", "g_sigma_mhz"),
            grid_min=self.get("ensemble", "g_grid_min_mhz"),
            grid_max=self.get("ensemble", "g_grid_max_mhz"),
            grid_points=self.get("ensemble", "g_grid_points"))

    def detuning_grid_mhz(self) -> np.ndarray:
        n = self.get("scan", "detuning_points")
        return np.linspace(self.get("scan", "detuning_min_mhz"),
                           self.get("scan", "detuning_max_mhz"), n)

    def tau_grid_us(self) -> np.ndarray:
        return np.linspace(0.0, self.get("g2", "tau_max_us"),
                           self.get("g2", "tau_points"))

    def kappa_drop_grid_mhz(self) -> np.ndarray:
        return np.linspace(self.get("sweep", "kappa_drop_min_mhz"),
                           self.get("sweep", "kappa_drop_max_mhz"),
                           self.get("sweep", "kappa_drop_points"))

    def transit_config(self) -> TransitConfig:
        t = self.values["transit"]
        return TransitConfig(
            g_peak=TWO_PI * t["g_peak_mhz"],
            transit_sigma=t["transit_sigma_us"],
            flux_in=t["flux_in_per_us"],
            detection_efficiency=t["detection_efficiency"],
            timebin=t["timebin_us"],
            duration=t["duration_us"],
            rng_seed=self.get("run", "seed"),
            bus_floor=t["bus_floor"])

    def trigger_config(self) -> TriggerConfig:
        t = self.values["trigger"]
        return TriggerConfig(threshold_counts=t["threshold_counts"],
                             window=t["window_us"], latency=t["latency_us"])

    def lines(self) -> list[str]:
        """Deterministic flat dump of the resolved configuration."""
        out = []
        for section in sorted(self.values):
            for key in sorted(self.values[section]):
                out.append(f"[{section}] {key} = {self.values[section][key]}")
        return out
