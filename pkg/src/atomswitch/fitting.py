"""Least-squares fitting of transmission spectra.

Two fitters are provided: a four-parameter Lorentzian for empty-resonator
lines, and the two-parameter (g_mean, g_sigma) fit of ensemble-averaged
master-equation spectra to measured bus/drop data.  Both use derivative-free
simplex descent (Nelder-Mead) with restarts from jittered initial guesses;
the distribution fit never differentiates through the master-equation
solver, and the expensive spectra-by-g table is computed once and reused by
every objective evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .analytics import LorentzianShape, lorentzian
from .ensemble import GDistribution, gaussian_weights, g_grid, spectra_by_g
from .errors import InvalidArgumentError
from .hilbert import HilbertSpace
from .lindblad import SystemParams

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SpectrumData:
    """Measured transmission of one port versus detuning (MHz)."""

    detuning_mhz: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.detuning_mhz, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if d.ndim != 1 or v.shape != d.shape:
            raise InvalidArgumentError("detuning and values must be matching 1-d arrays")
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != d.shape:
                raise InvalidArgumentError("sigma must match the data shape")
            if np.any(s <= 0):
                raise InvalidArgumentError("sigma values must be > 0")
        object.__setattr__(self, "detuning_mhz", d)
        object.__setattr__(self, "values", v)

    @property
    def n_points(self) -> int:
        return self.detuning_mhz.size

    def weights(self) -> np.ndarray:
        """1/sigma^2 residual weights; uniform when no uncertainties given."""
        if self.sigma is None:
            return np.ones(self.n_points)
        return 1.0 / np.asarray(self.sigma, dtype=float) ** 2


@dataclass
class FitResult:
    """Outcome of one fit; ``converged`` implies the residual improved."""

    params: dict[str, float]
    rss: float
    rss_initial: float
    iterations: int
    converged: bool
    boundary_warning: bool = False
    message: str = ""


def _require_points(data: SpectrumData, minimum: int, label: str) -> None:
    if data.n_points < minimum:
        raise InvalidArgumentError(
            f"{label} needs at least {minimum} points, got {data.n_points}")


def _simplex(objective, x0: np.ndarray, *, restarts: int, max_iterations: int,
             seed: int):
    """Nelder-Mead from x0 plus jittered restarts; returns the best run."""
    rng = np.random.default_rng(seed)
    starts = [np.asarray(x0, dtype=float)]
    for _ in range(restarts):
        jitter = 1.0 + 0.1 * rng.standard_normal(len(x0))
        starts.append(np.asarray(x0, dtype=float) * jitter)
    scale = 1.0 + float(np.abs(x0).max())
    best = None
    total_iter = 0
    for s in starts:
        res = minimize(objective, s, method="Nelder-Mead",
                       options={"maxiter": max_iterations,
                                "xatol": 1e-9 * scale,
                                "fatol": 1e-9 * (1.0 + abs(float(objective(s)))),
                                })
        total_iter += res.nit
        if best is None or res.fun < best.fun:
            best = res
    return best, total_iter


def fit_lorentzian(data: SpectrumData, initial: LorentzianShape, *,
                   restarts: int = 3, max_iterations: int = 2000,
                   seed: int = 0) -> FitResult:
    """Least-squares Lorentzian fit of (center, half_width, amplitude, offset)."""
    _require_points(data, 5, "Lorentzian fit")
    w = data.weights()
    y = data.values
    x = data.detuning_mhz

    def objective(theta):
        c, hw, amp, off = theta
        hw = abs(hw)
        if hw == 0.0:
            return np.inf
        model = off + amp * hw * hw / ((x - c) ** 2 + hw * hw)
        r = model - y
        return float(np.sum(w * r * r))

    x0 = np.array([initial.center, initial.half_width,
                   initial.amplitude, initial.offset], dtype=float)
    f0 = objective(x0)
    best, n_iter = _simplex(objective, x0, restarts=restarts,
                            max_iterations=max_iterations, seed=seed)
    c, hw, amp, off = best.x
    converged = bool(best.success) and best.fun <= f0 + 1e-12
    return FitResult(
        params={"center": float(c), "half_width": float(abs(hw)),
                "amplitude": float(amp), "offset": float(off)},
        rss=float(best.fun), rss_initial=float(f0), iterations=int(n_iter),
        converged=converged, message=str(best.message))


def splitting_initial_guess(drop_data: SpectrumData,
                            dist: GDistribution) -> tuple[float, float]:
    """Heuristic (g_mean, g_sigma) start from the drop-port peak splitting.

    The vacuum-Rabi peaks sit near detuning +-g, so half the observed peak
    separation estimates g_mean; sigma starts at 30% of it.  The guess is
    clamped into the distribution grid.
    """
    x = drop_data.detuning_mhz
    y = drop_data.values
    pos = x > 0
    neg = x < 0
    if np.any(pos) and np.any(neg):
        d_plus = x[pos][np.argmax(y[pos])]
        d_minus = x[neg][np.argmax(y[neg])]
        g0 = TWO_PI * 0.5 * (d_plus - d_minus)
    else:
        g0 = 0.0
    g0 = float(np.clip(g0, dist.grid_min, dist.grid_max))
    spacing = (dist.grid_max - dist.grid_min) / (dist.grid_points - 1)
    sigma0 = max(0.3 * g0, spacing)
    return g0, sigma0


class GDistributionObjective:
    """Chi-square of the two-port ensemble model against measured spectra.

    Holds the precomputed spectra-by-g table; each evaluation only reweights
    it, so the simplex loop is cheap.  Evaluation is a pure function of
    (g_mean, g_sigma).
    """

    def __init__(self, space: HilbertSpace, params: SystemParams,
                 dist: GDistribution, bus_data: SpectrumData,
                 drop_data: SpectrumData, table=None):
        if not np.array_equal(bus_data.detuning_mhz, drop_data.detuning_mhz):
            raise InvalidArgumentError(
                "bus and drop data must share one detuning grid")
        self.dist = dist
        self.g_values = g_grid(dist)
        self.bus_data = bus_data
        self.drop_data = drop_data
        if table is None:
            table = spectra_by_g(space, params, self.g_values,
                                 bus_data.detuning_mhz)
        self.t_bus = np.stack([s.t_bus for s in table])    # (n_g, n_detuning)
        self.t_drop = np.stack([s.t_drop for s in table])
        self._w_bus = bus_data.weights()
        self._w_drop = drop_data.weights()

    def model(self, g_mean: float, g_sigma: float):
        d = GDistribution(g_mean=g_mean, g_sigma=max(abs(g_sigma), 1e-12),
                          grid_min=self.dist.grid_min,
                          grid_max=self.dist.grid_max,
                          grid_points=self.dist.grid_points)
        w = gaussian_weights(d, self.g_values)
        return w @ self.t_bus, w @ self.t_drop

    def __call__(self, theta) -> float:
        g_mean, g_sigma = float(theta[0]), float(theta[1])
        m_bus, m_drop = self.model(g_mean, g_sigma)
        r_bus = m_bus - self.bus_data.values
        r_drop = m_drop - self.drop_data.values
        return float(np.sum(self._w_bus * r_bus * r_bus)
                     + np.sum(self._w_drop * r_drop * r_drop))


def fit_g_distribution(bus_data: SpectrumData, drop_data: SpectrumData,
                       dist: GDistribution, space: HilbertSpace,
                       params: SystemParams, *,
                       initial: tuple[float, float] | None = None,
                       restarts: int = 3, max_iterations: int = 2000,
                       seed: int = 0,
                       objective: GDistributionObjective | None = None) -> FitResult:
    """Two-parameter fit of the coupling-strength distribution to data.

    The free parameters are exactly (g_mean, g_sigma), in rad/us; both ports
    are fitted jointly with equal weight.  A ``boundary_warning`` is set if
    the fitted mean leaves the grid interval, where the model can no longer
    track it.
    """
    n_free = 2
    _require_points(bus_data, 2 * n_free + 1, "distribution fit")
    _require_points(drop_data, 2 * n_free + 1, "distribution fit")
    if objective is None:
        objective = GDistributionObjective(space, params, dist,
                                           bus_data, drop_data)
    if initial is None:
        initial = splitting_initial_guess(drop_data, dist)
    x0 = np.asarray(initial, dtype=float)
    f0 = objective(x0)
    best, n_iter = _simplex(objective, x0, restarts=restarts,
                            max_iterations=max_iterations, seed=seed)
    g_mean, g_sigma = float(best.x[0]), float(abs(best.x[1]))
    converged = bool(best.success) and best.fun <= f0 + 1e-12
    boundary = not (dist.grid_min <= g_mean <= dist.grid_max)
    return FitResult(
        params={"g_mean": g_mean, "g_sigma": g_sigma},
        rss=float(best.fun), rss_initial=float(f0), iterations=int(n_iter),
        converged=converged, boundary_warning=boundary,
        message=str(best.message))


def read_spectrum_data(path) -> tuple[SpectrumData, SpectrumData]:
    """Read (bus, drop) data from delimited text.

    Columns: detuning_MHz, T_bus, T_bus_sigma, T_drop, T_drop_sigma; comma
    separated, '#' comments.  Zero sigmas mean 'no uncertainty given'.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh
                     if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read data file {path}: {exc}") from exc
    if lines:
        try:
            float(lines[0].split(",")[0])
        except ValueError:
            lines = lines[1:]   # tolerate one plain column-name row
    if not lines:
        raise InvalidArgumentError(f"no data rows in {path}")
    raw = np.loadtxt(lines, delimiter=",", ndmin=2)
    if raw.shape[1] != 5:
        raise InvalidArgumentError(
            f"expected 5 columns (detuning, T_bus, T_bus_sigma, T_drop, "
            f"T_drop_sigma), got {raw.shape[1]}")
    det = raw[:, 0]

    def _maybe_sigma(col):
        return None if np.all(col == 0) else col

    bus = SpectrumData(det, raw[:, 1], _maybe_sigma(raw[:, 2]))
    drop = SpectrumData(det, raw[:, 3], _maybe_sigma(raw[:, 4]))
    return bus, drop
