"""Averaging over a Gaussian distribution of coupling strengths.

The atom moves through the resonator mode, so repeated runs sample different
coupling strengths g.  Observables are modeled as a classical mixture over a
truncated normal distribution of g evaluated on a uniform grid: spectra
average pointwise, while correlation functions average at the level of the
unnormalized G2 and are renormalized to the uncorrelated long-delay limit of
the mixture (so g2 -> 1 for tau >> 1/kappa, matching how measured curves are
normalized).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UndefinedCorrelationError
from .hilbert import HilbertSpace
from .lindblad import (
    G2Curve,
    Spectrum,
    SystemParams,
    g2_raw,
    spectrum,
    steady_state,
    build_liouvillian,
    transmissions,
)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GDistribution:
    """Truncated Gaussian over coupling strength, sampled on a uniform grid.

    All rates in rad/us.  The grid bounds are the physically accessible
    coupling range; weights are renormalized on the grid.
    """

    g_mean: float
    g_sigma: float
    grid_min: float
    grid_max: float
    grid_points: int = 46

    def __post_init__(self):
        if self.g_sigma <= 0:
            raise InvalidArgumentError("g_sigma must be > 0")
        if not self.grid_min < self.grid_max:
            raise InvalidArgumentError("grid_min must be < grid_max")
        if self.grid_points < 2:
            raise InvalidArgumentError("grid_points must be >= 2")

    @classmethod
    def from_mhz(cls, g_mean, g_sigma, grid_min=7.5, grid_max=30.0,
                 grid_points=46) -> "GDistribution":
        return cls(g_mean=TWO_PI * g_mean, g_sigma=TWO_PI * g_sigma,
                   grid_min=TWO_PI * grid_min, grid_max=TWO_PI * grid_max,
                   grid_points=int(grid_points))


def g_grid(dist: GDistribution) -> np.ndarray:
    """Uniform grid of coupling strengths (rad/us)."""
    return np.linspace(dist.grid_min, dist.grid_max, dist.grid_points)


def gaussian_weights(dist: GDistribution,
                     g_values: np.ndarray | None = None) -> np.ndarray:
    """Nonnegative weights proportional to the normal density, summing to 1."""
    if g_values is None:
        g_values = g_grid(dist)
    g_values = np.asarray(g_values, dtype=float)
    z = (g_values - dist.g_mean) / dist.g_sigma
    # subtract the max exponent so a tiny sigma concentrates cleanly instead
    # of underflowing to all-zero weights
    log_w = -0.5 * z * z
    w = np.exp(log_w - log_w.max())
    return w / w.sum()


def ensemble_spectrum(spectra_by_g_list: list[Spectrum],
                      weights: np.ndarray) -> Spectrum:
    """Pointwise weighted average of spectra sharing one detuning grid."""
    if len(spectra_by_g_list) == 0:
        raise InvalidArgumentError("no spectra to average")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(spectra_by_g_list),):
        raise InvalidArgumentError(
            f"{weights.size} weights for {len(spectra_by_g_list)} spectra")
    grid = spectra_by_g_list[0].detuning_mhz
    for s in spectra_by_g_list[1:]:
        if s.detuning_mhz.shape != grid.shape or not np.array_equal(s.detuning_mhz, grid):
            raise InvalidArgumentError("spectra do not share a detuning grid")
    t_bus = sum(w * s.t_bus for w, s in zip(weights, spectra_by_g_list))
    t_drop = sum(w * s.t_drop for w, s in zip(weights, spectra_by_g_list))
    loss = sum(w * s.loss for w, s in zip(weights, spectra_by_g_list))
    return Spectrum(detuning_mhz=grid.copy(), t_bus=np.asarray(t_bus),
                    t_drop=np.asarray(t_drop), loss=np.asarray(loss))


def spectra_by_g(space: HilbertSpace, params: SystemParams,
                 g_values: np.ndarray,
                 detuning_grid_mhz: np.ndarray) -> list[Spectrum]:
    """Master-equation spectra for each coupling strength on the grid.

    This is the expensive stage of every ensemble computation and of the
    two-parameter distribution fit; callers cache and reuse the result.
    """
    return [spectrum(space, params.replace(g=float(g)), detuning_grid_mhz)
            for g in np.asarray(g_values, dtype=float)]


def ensemble_transmissions(space: HilbertSpace, params: SystemParams,
                           dist: GDistribution) -> tuple[float, float, float]:
    """Weighted-average (T_bus, T_drop, loss) at the detuning held by params."""
    gs = g_grid(dist)
    w = gaussian_weights(dist, gs)
    acc = np.zeros(3)
    for wk, g in zip(w, gs):
        acc += wk * np.array(transmissions(space, params.replace(g=float(g))))
    return float(acc[0]), float(acc[1]), float(acc[2])


def ensemble_g2(space: HilbertSpace, params: SystemParams, dist: GDistribution,
                port: str, tau_grid: np.ndarray, *, rtol: float = 1e-10) -> G2Curve:
    """Mixture g2(tau): sum_k w_k G2_k(tau) / sum_k w_k F_k^2.

    The denominator is the tau -> inf limit of the averaged G2, so the curve
    is normalized to 1 at long delays.  Normalizing instead by the squared
    mean flux would leave the ratio <F^2>/<F>^2 > 1 at all delays, which is
    the inter-run intensity variance, not the photon statistics of interest.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    gs = g_grid(dist)
    w = gaussian_weights(dist, gs)
    num = np.zeros(tau_grid.size)
    den = 0.0
    for wk, g in zip(w, gs):
        p = params.replace(g=float(g))
        raw, flux = g2_raw(space, p, port, tau_grid, rtol=rtol)
        num += wk * raw
        den += wk * flux * flux
    if den < 1e-60:
        raise UndefinedCorrelationError(
            f"ensemble mean {port} flux vanishes; g2 undefined")
    return G2Curve(port=port, tau_us=tau_grid.copy(), values=num / den)
