"""Switch figures of merit: fidelity, recovery, contrast, entanglement.

Negativity convention: N(rho) = ||rho^(T_atom)||_1 - 1, i.e. twice the sum of
the magnitudes of the negative eigenvalues of the partial transpose.  A
maximally entangled two-qubit state gives exactly 1 under this convention
(the halved convention would cap at 0.5).

Recovery definition: the probability to recover an incident photon is the
equal-weight mean of the total throughput (both output ports) in the OFF
state (atom coupled) and the ON state (no atom).  Other mixtures of the two
switch states are defensible; this one is fixed here and recorded in every
result header the CLI writes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import (
    CouplerConfig,
    critical_atom_number,
    critical_kappa_bus,
    empty_cavity_response,
    weak_drive_response,
)
from .ensemble import GDistribution, ensemble_transmissions
from .errors import InvalidArgumentError
from .hilbert import HilbertSpace, check_density_matrix
from .lindblad import SystemParams, transmissions


def fidelity(t_bus_at: float, t_drop_0: float) -> float:
    """Probability that one input photon leaves by the correct port,
    averaged over the two switch states: (T_bus^at + T_drop^0) / 2."""
    for name, v in (("t_bus_at", t_bus_at), ("t_drop_0", t_drop_0)):
        if not 0.0 <= v <= 1.0:
            raise InvalidArgumentError(f"{name} = {v} outside [0, 1]")
    return 0.5 * (t_bus_at + t_drop_0)


def recovery(t_bus_at: float, t_drop_at: float,
             t_bus_0: float, t_drop_0: float) -> float:
    """Equal-weight mean of total throughput in the OFF and ON states."""
    for name, v in (("t_bus_at", t_bus_at), ("t_drop_at", t_drop_at),
                    ("t_bus_0", t_bus_0), ("t_drop_0", t_drop_0)):
        if not 0.0 <= v <= 1.0:
            raise InvalidArgumentError(f"{name} = {v} outside [0, 1]")
    return 0.5 * ((t_bus_at + t_drop_at) + (t_bus_0 + t_drop_0))


def contrast_db(t_on: float, t_off: float, direction: str = "increase") -> float:
    """Switching contrast in dB between the ON and OFF transmissions.

    ``direction="increase"`` (bus port: transmission rises when the atom
    arrives) returns 10 log10(t_off / t_on); ``"decrease"`` (drop port)
    returns 10 log10(t_on / t_off).
    """
    if t_on <= 0 or t_off <= 0:
        raise InvalidArgumentError("contrast requires strictly positive transmissions")
    if direction == "increase":
        return 10.0 * float(np.log10(t_off / t_on))
    if direction == "decrease":
        return 10.0 * float(np.log10(t_on / t_off))
    raise InvalidArgumentError(f"direction must be 'increase' or 'decrease', got {direction!r}")


def entangled_state(amp_coupled: tuple[complex, complex],
                    amp_uncoupled: tuple[complex, complex]) -> np.ndarray:
    """Atom-photon state after routing one photon through the switch.

    The atom starts in an equal superposition of a resonator-coupled and an
    uncoupled internal state; the photon is routed into (bus, drop) with the
    given complex amplitudes per branch.  The space is (atom qubit: coupled,
    uncoupled) x (photon qutrit: bus, drop, lost).  Loss amplitude
    sqrt(1 - |b|^2 - |d|^2) of each branch goes to branch-orthogonal
    environment states which are traced out, so coherence survives in the
    (bus, drop) sector but never between loss events of different branches
    (the pessimistic loss model).
    """
    b_c, d_c = (complex(amp_coupled[0]), complex(amp_coupled[1]))
    b_u, d_u = (complex(amp_uncoupled[0]), complex(amp_uncoupled[1]))
    loss2 = []
    for name, (b, d) in (("coupled", (b_c, d_c)), ("uncoupled", (b_u, d_u))):
        norm2 = abs(b) ** 2 + abs(d) ** 2
        if norm2 > 1.0 + 1e-12:
            raise InvalidArgumentError(
                f"{name}-branch amplitudes have norm^2 = {norm2} > 1")
        loss2.append(max(0.0, 1.0 - norm2))
    psi = np.zeros(6, dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    psi[0] = inv_sqrt2 * b_c   # |coupled, bus>
    psi[1] = inv_sqrt2 * d_c   # |coupled, drop>
    psi[3] = inv_sqrt2 * b_u   # |uncoupled, bus>
    psi[4] = inv_sqrt2 * d_u   # |uncoupled, drop>
    rho = np.outer(psi, psi.conj())
    rho[2, 2] += 0.5 * loss2[0]   # |coupled, lost>
    rho[5, 5] += 0.5 * loss2[1]   # |uncoupled, lost>
    return rho


def partial_transpose(rho: np.ndarray, dims: tuple[int, int],
                      subsystem: int = 0) -> np.ndarray:
    """Transpose one tensor factor of a bipartite density matrix."""
    da, db = dims
    rho = np.asarray(rho)
    if rho.shape != (da * db, da * db):
        raise InvalidArgumentError(
            f"shape {rho.shape} incompatible with dims {dims}")
    r = rho.reshape(da, db, da, db)
    if subsystem == 0:
        r = r.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        r = r.transpose(0, 3, 2, 1)
    else:
        raise InvalidArgumentError("subsystem must be 0 or 1")
    return r.reshape(da * db, da * db)


def negativity(rho: np.ndarray, dims: tuple[int, int] = (2, 3),
               subsystem: int = 0) -> float:
    """||rho^Gamma||_1 - 1 over the declared bipartition.

    Zero for every separable state; 1 for a maximally entangled qubit pair.
    The input must satisfy the density-matrix invariants.
    """
    check_density_matrix(rho)
    pt = partial_transpose(rho, dims, subsystem)
    eig = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(np.abs(eig).sum() - 1.0)


def conditioned_on_survival(rho: np.ndarray) -> np.ndarray:
    """Project the 2x3 atom-photon state onto the photon-recovered sector.

    Discards the |lost> photon column and renormalizes; the result is the
    state heralded by a detection in either fiber.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (6, 6):
        raise InvalidArgumentError(f"expected a 6x6 state, got {rho.shape}")
    proj = np.kron(np.eye(2), np.diag([1.0, 1.0, 0.0])).astype(complex)
    kept = proj @ rho @ proj
    p = float(np.trace(kept).real)
    if p <= 1e-30:
        raise InvalidArgumentError("photon survival probability vanishes")
    return kept / p


@dataclass(frozen=True)
class SwitchMetrics:
    """Figures of merit for one operating point."""

    fidelity: float
    recovery: float
    contrast_bus_db: float
    contrast_drop_db: float
    n0: float
    negativity: float

    def __post_init__(self):
        for name in ("fidelity", "recovery", "negativity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0 + 1e-12:
                raise InvalidArgumentError(f"{name} = {v} outside [0, 1]")


@dataclass(frozen=True)
class OperatingPointResult:
    """Transmissions and metrics of one (kappa set, g distribution) point."""

    kappa_i: float
    kappa_bus: float
    kappa_drop: float
    gamma: float
    t_bus_at: float
    t_drop_at: float
    loss_at: float
    t_bus_0: float
    t_drop_0: float
    loss_0: float
    metrics: SwitchMetrics
    state: np.ndarray

    @property
    def kappa(self) -> float:
        return self.kappa_i + self.kappa_bus + self.kappa_drop


def _phase(z: complex) -> complex:
    m = abs(z)
    return z / m if m > 0 else 1.0 + 0.0j


def switch_state_amplitudes(kappa_i, kappa_bus, kappa_drop, gamma, g_mean,
                            t_at: tuple[float, float],
                            t_0: tuple[float, float]):
    """Complex (bus, drop) amplitudes for the two atomic branches.

    Magnitudes come from the supplied port powers (typically
    ensemble-averaged master-equation values); phases come from the
    on-resonance linear-response amplitudes, which are real up to sign.
    """
    tb_w, td_w = weak_drive_response(kappa_i, kappa_bus, kappa_drop,
                                     gamma, g_mean, 0.0, 0.0)
    tb_0, td_0 = empty_cavity_response(kappa_i, kappa_bus, kappa_drop, 0.0)
    coupled = (_phase(tb_w) * np.sqrt(t_at[0]), _phase(td_w) * np.sqrt(t_at[1]))
    uncoupled = (_phase(tb_0) * np.sqrt(t_0[0]), _phase(td_0) * np.sqrt(t_0[1]))
    return coupled, uncoupled


def evaluate_operating_point(space: HilbertSpace, kappa_i: float,
                             kappa_bus: float, kappa_drop: float, gamma: float,
                             dist: GDistribution, *, flux_in: float,
                             bus_floor: float = 0.03,
                             linear_flux_in: float | None = None) -> OperatingPointResult:
    """Full metrics pipeline for one coupler setting.

    OFF-state transmissions are ensemble averages of master-equation steady
    states over the g distribution; ON-state transmissions come from the
    empty resonator.  ``bus_floor`` is the residual ON-state bus transmission
    used for the contrast figure (the ideal model gives essentially zero,
    which would make the contrast in dB unbounded).

    The entangled-state amplitudes, and hence the negativity, are always
    weak-drive quantities: when ``linear_flux_in`` is given and differs from
    ``flux_in``, a second ensemble pass at that flux supplies the amplitude
    magnitudes, so saturation at the throughput flux never leaks into the
    entanglement figure.
    """
    base = SystemParams(kappa_i=kappa_i, kappa_bus=kappa_bus,
                        kappa_drop=kappa_drop, gamma=gamma, g=0.0,
                        flux_in=flux_in)
    t_bus_0, t_drop_0, loss_0 = transmissions(space, base)
    t_bus_at, t_drop_at, loss_at = ensemble_transmissions(space, base, dist)
    f = fidelity(min(t_bus_at, 1.0), min(t_drop_0, 1.0))
    r = recovery(min(t_bus_at, 1.0), min(t_drop_at, 1.0),
                 min(t_bus_0, 1.0), min(t_drop_0, 1.0))
    c_bus = contrast_db(max(t_bus_0, bus_floor), t_bus_at, "increase")
    c_drop = contrast_db(t_drop_0, t_drop_at, "decrease")
    kappa = kappa_i + kappa_bus + kappa_drop
    n0 = critical_atom_number(kappa, gamma, dist.g_mean)
    if linear_flux_in is None or linear_flux_in == flux_in:
        amp_at = (t_bus_at, t_drop_at)
        amp_0 = (t_bus_0, t_drop_0)
    else:
        lin = base.replace(flux_in=linear_flux_in)
        b0, d0, _ = transmissions(space, lin)
        ba, da, _ = ensemble_transmissions(space, lin, dist)
        amp_at = (ba, da)
        amp_0 = (b0, d0)
    coupled, uncoupled = switch_state_amplitudes(
        kappa_i, kappa_bus, kappa_drop, gamma, dist.g_mean, amp_at, amp_0)
    state = entangled_state(coupled, uncoupled)
    neg = negativity(state)
    metrics = SwitchMetrics(fidelity=f, recovery=r, contrast_bus_db=c_bus,
                            contrast_drop_db=c_drop, n0=n0,
                            negativity=max(neg, 0.0))
    return OperatingPointResult(
        kappa_i=kappa_i, kappa_bus=kappa_bus, kappa_drop=kappa_drop,
        gamma=gamma, t_bus_at=t_bus_at, t_drop_at=t_drop_at, loss_at=loss_at,
        t_bus_0=t_bus_0, t_drop_0=t_drop_0, loss_0=loss_0,
        metrics=metrics, state=state)


def kappa_sweep(space: HilbertSpace, kappa_i: float, h: float, gamma: float,
                kappa_drop_values: np.ndarray, dist: GDistribution, *,
                flux_in: float, bus_floor: float = 0.03,
                linear_flux_in: float | None = None) -> list[OperatingPointResult]:
    """Scan the drop coupling while re-solving bus criticality at each point."""
    out = []
    for kd in np.asarray(kappa_drop_values, dtype=float):
        kb = critical_kappa_bus(CouplerConfig(kappa_i=kappa_i, kappa_drop=kd, h=h))
        out.append(evaluate_operating_point(
            space, kappa_i, kb, kd, gamma, dist,
            flux_in=flux_in, bus_floor=bus_floor, linear_flux_in=linear_flux_in))
    return out


@dataclass(frozen=True)
class ProjectionResult:
    """Raw and photon-recovery-conditioned figures for a scenario point."""

    kappa_i: float
    kappa_bus: float
    kappa_drop: float
    gamma: float
    g: float
    t_bus_at: float
    t_drop_at: float
    t_bus_0: float
    t_drop_0: float
    fidelity_raw: float
    negativity_raw: float
    recovery: float
    fidelity_conditional: float
    negativity_conditional: float


def projection_scenario(space: HilbertSpace, kappa_i: float, kappa_drop: float,
                        h: float, gamma: float, g: float, *,
                        quality_factor_ratio: float = 5.0,
                        flux_in: float = 0.01) -> ProjectionResult:
    """Improved-resonator scenario: kappa_i scaled down, one fixed g.

    Models a resonator with the intrinsic loss reduced by
    ``quality_factor_ratio`` and an atom trapped at constant coupling
    (no g spread).  Alongside the raw figures it reports the fidelity and
    negativity conditioned on the photon leaving through either fiber,
    which quantify the entanglement available once a photon is recovered.
    """
    if quality_factor_ratio <= 0:
        raise InvalidArgumentError("quality_factor_ratio must be > 0")
    ki = kappa_i / quality_factor_ratio
    kb = critical_kappa_bus(CouplerConfig(kappa_i=ki, kappa_drop=kappa_drop, h=h))
    base = SystemParams(kappa_i=ki, kappa_bus=kb, kappa_drop=kappa_drop,
                        gamma=gamma, g=0.0, flux_in=flux_in)
    t_bus_0, t_drop_0, _ = transmissions(space, base)
    t_bus_at, t_drop_at, _ = transmissions(space, base.replace(g=g))
    f_raw = fidelity(min(t_bus_at, 1.0), min(t_drop_0, 1.0))
    rec = recovery(min(t_bus_at, 1.0), min(t_drop_at, 1.0),
                   min(t_bus_0, 1.0), min(t_drop_0, 1.0))
    coupled, uncoupled = switch_state_amplitudes(
        ki, kb, kappa_drop, gamma, g, (t_bus_at, t_drop_at), (t_bus_0, t_drop_0))
    state = entangled_state(coupled, uncoupled)
    n_raw = negativity(state)
    n_cond = negativity(conditioned_on_survival(state))
    f_cond = f_raw / rec if rec > 0 else 0.0
    return ProjectionResult(
        kappa_i=ki, kappa_bus=kb, kappa_drop=kappa_drop, gamma=gamma, g=g,
        t_bus_at=t_bus_at, t_drop_at=t_drop_at, t_bus_0=t_bus_0,
        t_drop_0=t_drop_0, fidelity_raw=f_raw, negativity_raw=max(n_raw, 0.0),
        recovery=rec, fidelity_conditional=min(f_cond, 1.0),
        negativity_conditional=max(n_cond, 0.0))
