"""Closed-form coupled-mode results for the four-port add-drop resonator.

These are the independent oracles for the master-equation engine: critical
coupling of the bus fiber, the empty-cavity and weak-drive (single
excitation) linear responses, the critical atom number, and the Lorentzian
lineshape used for fitting.

Conventions: kappa_i, kappa_bus, kappa_drop, gamma are field/dipole
*amplitude* decay rates in rad/us (intensities decay at twice these rates);
the total field decay is kappa = kappa_i + kappa_bus + kappa_drop.  The
backscattering rate h enters only the critical-coupling condition; the
response formulas take the low-backscattering limit h = 0.  Complex
amplitudes are returned so phase information can feed the entangled-state
construction; port powers are |t|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class CouplerConfig:
    """Intrinsic loss, drop-coupler rate and backscattering rate (rad/us)."""

    kappa_i: float
    kappa_drop: float
    h: float = 0.0

    def __post_init__(self):
        if self.kappa_i < 0 or self.kappa_drop < 0 or self.h < 0:
            raise InvalidArgumentError("coupler rates must be >= 0")


def critical_kappa_bus(cfg: CouplerConfig) -> float:
    """Bus-coupler rate that extinguishes resonant bus transmission.

    Returns sqrt((kappa_i + kappa_drop)^2 + h^2); with h = 0 this reduces to
    kappa_i + kappa_drop.
    """
    return float(np.hypot(cfg.kappa_i + cfg.kappa_drop, cfg.h))


def empty_cavity_response(kappa_i: float, kappa_bus: float, kappa_drop: float,
                          delta: float | np.ndarray):
    """Linear response of the bare resonator.

    Returns complex amplitudes (t_bus, t_drop) at resonator-laser detuning
    ``delta`` (rad/us):

        t_bus  = 1 - 2 kappa_bus / (kappa + i delta)
        t_drop = 2 sqrt(kappa_bus kappa_drop) / (kappa + i delta)

    At critical coupling and delta = 0 the bus port interferes to zero and
    |t_drop|^2 = 1 - 2 kappa_i / kappa.
    """
    if kappa_i < 0 or kappa_bus < 0 or kappa_drop < 0:
        raise InvalidArgumentError("rates must be >= 0")
    kappa = kappa_i + kappa_bus + kappa_drop
    if kappa <= 0:
        raise InvalidArgumentError("at least one decay rate must be positive")
    den = kappa + 1j * np.asarray(delta, dtype=float)
    t_bus = 1.0 - 2.0 * kappa_bus / den
    t_drop = 2.0 * np.sqrt(kappa_bus * kappa_drop) / den
    return t_bus, t_drop


def weak_drive_response(kappa_i: float, kappa_bus: float, kappa_drop: float,
                        gamma: float, g: float,
                        delta_rl: float | np.ndarray,
                        delta_al: float | np.ndarray):
    """Single-excitation response with an atom coupled at strength g.

    The atom enters through the susceptibility term g^2 / (gamma + i
    delta_al) added to the cavity denominator:

        t_bus  = 1 - 2 kappa_bus / (kappa + i delta_rl + g^2/(gamma + i delta_al))
        t_drop = 2 sqrt(kappa_bus kappa_drop) / (same denominator)

    Valid in the weak-drive limit (much less than one intracavity photon).
    g = 0 reduces exactly to :func:`empty_cavity_response`.
    """
    if kappa_i < 0 or kappa_bus < 0 or kappa_drop < 0 or gamma < 0:
        raise InvalidArgumentError("rates must be >= 0")
    kappa = kappa_i + kappa_bus + kappa_drop
    if kappa <= 0:
        raise InvalidArgumentError("at least one decay rate must be positive")
    delta_rl = np.asarray(delta_rl, dtype=float)
    delta_al = np.asarray(delta_al, dtype=float)
    if g != 0.0:
        atom_den = gamma + 1j * delta_al
        if np.any(np.abs(atom_den) == 0.0):
            raise InvalidArgumentError(
                "atomic susceptibility diverges: gamma = delta_al = 0 with g > 0")
        atom_term = g * g / atom_den
    else:
        atom_term = np.zeros_like(delta_al, dtype=complex)
    den = kappa + 1j * delta_rl + atom_term
    t_bus = 1.0 - 2.0 * kappa_bus / den
    t_drop = 2.0 * np.sqrt(kappa_bus * kappa_drop) / den
    return t_bus, t_drop


def critical_atom_number(kappa: float, gamma: float, g: float) -> float:
    """N0 = 2 kappa gamma / g^2; the switch is robust while 2/N0 > 1."""
    if g <= 0:
        raise InvalidArgumentError("g must be > 0 for the critical atom number")
    return 2.0 * kappa * gamma / (g * g)


@dataclass(frozen=True)
class LorentzianShape:
    """offset + amplitude * hw^2 / ((delta - center)^2 + hw^2), all in MHz."""

    center: float
    half_width: float
    amplitude: float
    offset: float = 0.0

    def __post_init__(self):
        if self.half_width <= 0:
            raise InvalidArgumentError("half_width must be > 0")


def lorentzian(shape: LorentzianShape, delta: float | np.ndarray):
    """Evaluate the lineshape at detuning ``delta`` (MHz); vectorized."""
    d = np.asarray(delta, dtype=float) - shape.center
    hw2 = shape.half_width ** 2
    return shape.offset + shape.amplitude * hw2 / (d * d + hw2)
