"""Driven Jaynes-Cummings Liouvillian with four decay channels.

The model is a single traveling-wave resonator mode coupled to a two-level
atom, driven through the bus coupler, in the frame rotating at the laser
frequency:

    H = delta_rl a+a + delta_al s+s- + g (a+ s- + a s+) + i eta (a+ - a)

with drive amplitude eta = sqrt(2 kappa_bus flux_in).  Dissipation uses the
amplitude-decay convention: the jump operators are sqrt(2 kappa_i) a,
sqrt(2 kappa_bus) a, sqrt(2 kappa_drop) a and sqrt(2 gamma) s-, so
intensities decay at 2 kappa.  This convention is fixed by the
critical-coupling condition together with the empty-cavity drop
transmission 1 - 2 kappa_i / kappa.

Superoperators act on column-stacked density matrices: vec(rho) =
rho.reshape(-1, order="F"), so vec(A X B) = kron(B.T, A) vec(X).

Port observables (input-output):

    T_drop = 2 kappa_drop <a+a> / flux_in
    T_bus  = <B+B> / flux_in,  B = sqrt(flux_in) 1 - sqrt(2 kappa_bus) a
    loss   = (2 kappa_i <a+a> + 2 gamma <s+s->) / flux_in

The minus sign in B is fixed by requiring destructive interference
(T_bus = 0) for the empty critically-coupled resonator.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy.integrate import solve_ivp

from .errors import (
    InvalidArgumentError,
    IntegrationFailureError,
    SolverDegenerateError,
    TruncationError,
    UndefinedCorrelationError,
)
from .hilbert import (
    HilbertSpace,
    annihilation,
    atom_excitation,
    atom_lowering,
    atom_raising,
    expectation,
    identity,
    number_operator,
)

TWO_PI = 2.0 * np.pi

#: population allowed in the highest Fock level before the truncation is
#: declared inadequate
TRUNCATION_TOL = 1e-6


@dataclass(frozen=True)
class SystemParams:
    """Physical rates of the atom-resonator-fiber system.

    All rates and detunings are angular frequencies in rad/us; flux_in is a
    photon flux in photons/us.  delta_rl = omega_r - omega_l and
    delta_al = omega_a - omega_l.
    """

    kappa_i: float
    kappa_bus: float
    kappa_drop: float
    gamma: float
    g: float
    delta_rl: float = 0.0
    delta_al: float = 0.0
    flux_in: float = 0.0

    def __post_init__(self):
        for name in ("kappa_i", "kappa_bus", "kappa_drop", "gamma"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0")
        if self.flux_in < 0:
            raise InvalidArgumentError("flux_in must be >= 0")

    @property
    def kappa(self) -> float:
        """Total field decay rate of the resonator."""
        return self.kappa_i + self.kappa_bus + self.kappa_drop

    @classmethod
    def from_mhz(cls, kappa_i=0.0, kappa_bus=0.0, kappa_drop=0.0, gamma=0.0,
                 g=0.0, delta_rl=0.0, delta_al=0.0, flux_in=0.0) -> "SystemParams":
        """Build from ordinary frequencies nu = omega/2pi in MHz.

        The 2pi conversion happens exactly once, here; flux_in stays in
        photons/us.
        """
        return cls(
            kappa_i=TWO_PI * kappa_i,
            kappa_bus=TWO_PI * kappa_bus,
            kappa_drop=TWO_PI * kappa_drop,
            gamma=TWO_PI * gamma,
            g=TWO_PI * g,
            delta_rl=TWO_PI * delta_rl,
            delta_al=TWO_PI * delta_al,
            flux_in=flux_in,
        )

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


def drive_amplitude(params: SystemParams) -> float:
    """eta = sqrt(2 kappa_bus flux_in), real and positive by convention."""
    return float(np.sqrt(2.0 * params.kappa_bus * params.flux_in))


@dataclass(frozen=True)
class Liouvillian:
    """Generator of the open-system dynamics over column-stacked states."""

    matrix: np.ndarray
    space: HilbertSpace

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class Spectrum:
    """Port transmissions versus resonator-laser detuning (MHz)."""

    detuning_mhz: np.ndarray
    t_bus: np.ndarray
    t_drop: np.ndarray
    loss: np.ndarray


@dataclass(frozen=True)
class G2Curve:
    """Normalized second-order correlation of one output port."""

    port: str
    tau_us: np.ndarray
    values: np.ndarray


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix (Fortran order)."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vec, dtype=complex).reshape((dim, dim), order="F")


def trace_row(dim: int) -> np.ndarray:
    """Row vector r with r @ vec(rho) = Tr rho under column stacking."""
    r = np.zeros(dim * dim, dtype=complex)
    r[:: dim + 1] = 1.0
    return r


def build_hamiltonian(space: HilbertSpace, params: SystemParams) -> np.ndarray:
    """Driven Jaynes-Cummings Hamiltonian in the rotating frame (Hermitian)."""
    a = annihilation(space)
    sm = atom_lowering(space)
    sp = atom_raising(space)
    ad = a.conj().T
    eta = drive_amplitude(params)
    h = (params.delta_rl * (ad @ a)
         + params.delta_al * (sp @ sm)
         + params.g * (ad @ sm + a @ sp)
         + 1j * eta * (ad - a))
    return h


def jump_operators(space: HilbertSpace, params: SystemParams) -> list[np.ndarray]:
    """Lindblad jump operators for the four decay channels (nonzero rates only)."""
    a = annihilation(space)
    sm = atom_lowering(space)
    ops = []
    for rate, op in ((params.kappa_i, a), (params.kappa_bus, a),
                     (params.kappa_drop, a), (params.gamma, sm)):
        if rate > 0:
            ops.append(np.sqrt(2.0 * rate) * op)
    return ops


def build_liouvillian(space: HilbertSpace, params: SystemParams) -> Liouvillian:
    """Assemble L with unitary part -i[H, .] plus the Lindblad dissipators."""
    dim = space.dim
    h = build_hamiltonian(space, params)
    eye = np.eye(dim, dtype=complex)
    mat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in jump_operators(space, params):
        cdc = c.conj().T @ c
        mat += (np.kron(c.conj(), c)
                - 0.5 * np.kron(eye, cdc)
                - 0.5 * np.kron(cdc.T, eye))
    return Liouvillian(matrix=mat, space=space)


def highest_fock_population(rho: np.ndarray, space: HilbertSpace) -> float:
    """Total population of the n = n_max Fock level (both atomic levels)."""
    i0 = space.index(space.n_max, 0)
    return float(rho[i0, i0].real + rho[i0 + 1, i0 + 1].real)


def steady_state(liouv: Liouvillian, *, residual_tol: float = 1e-10,
                 truncation_tol: float = TRUNCATION_TOL,
                 check_truncation: bool = True) -> np.ndarray:
    """Solve L vec(rho) = 0 with the trace constraint replacing one row.

    Returns a Hermitian unit-trace density matrix with
    ||L vec(rho)||_inf < residual_tol.  Raises
    :class:`SolverDegenerateError` when the system is singular beyond the
    trace constraint and :class:`TruncationError` when the top Fock level
    holds more than ``truncation_tol`` population.
    """
    dim = liouv.dim
    m = liouv.matrix.copy()
    m[0, :] = trace_row(dim)
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    try:
        with np.errstate(all="ignore"), warnings.catch_warnings():
            # a singular-to-machine factorization is detected below via the
            # residual; scipy's warning would only add noise
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(m, check_finite=False)
            x = sla.lu_solve((lu, piv), b, check_finite=False)
            # one pass of iterative refinement against round-off
            x += sla.lu_solve((lu, piv), b - m @ x, check_finite=False)
    except (ValueError, sla.LinAlgError) as exc:
        raise SolverDegenerateError(f"steady-state solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolverDegenerateError(
            "steady-state system is singular beyond the trace constraint")
    residual = float(np.abs(liouv.matrix @ x).max())
    if not np.isfinite(residual) or residual > residual_tol:
        raise SolverDegenerateError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.1e}; "
            "the generator may have a degenerate kernel")
    rho = unvectorize(x, dim)
    rho = 0.5 * (rho + rho.conj().T)
    if check_truncation:
        top = highest_fock_population(rho, liouv.space)
        if top > truncation_tol:
            raise TruncationError(
                f"population {top:.3e} in the n = {liouv.space.n_max} level "
                f"exceeds {truncation_tol:.1e}; rebuild with a larger n_max")
    return rho


def propagate(liouv: Liouvillian, rho0: np.ndarray, tau: float, *,
              rtol: float = 1e-8, atol: float | None = None) -> np.ndarray:
    """Apply exp(L tau) to an operator via adaptive-step integration.

    ``rho0`` need not be a state: quantum-regression seeds are propagated
    with the same generator.  The trace of the input is preserved to the
    integration tolerance.
    """
    states = propagate_grid(liouv, rho0, np.asarray([float(tau)]),
                            rtol=rtol, atol=atol)
    return states[0]


def propagate_grid(liouv: Liouvillian, rho0: np.ndarray, tau_grid: np.ndarray, *,
                   rtol: float = 1e-8, atol: float | None = None) -> np.ndarray:
    """exp(L tau) rho0 on an ascending grid of delays; returns (n_tau, dim, dim)."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or tau_grid.size == 0:
        raise InvalidArgumentError("tau_grid must be a nonempty 1-d array")
    if np.any(tau_grid < 0) or np.any(np.diff(tau_grid) < 0):
        raise InvalidArgumentError("tau_grid must be ascending and >= 0")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (liouv.dim, liouv.dim):
        raise InvalidArgumentError(
            f"operator shape {rho0.shape} does not match dimension {liouv.dim}")
    v0 = vectorize(rho0)
    out = np.empty((tau_grid.size, liouv.dim, liouv.dim), dtype=complex)
    t_end = float(tau_grid[-1])
    if t_end == 0.0:
        out[:] = rho0
        return out
    if atol is None:
        atol = 1e-12 * max(1.0, float(np.abs(v0).max()))
    mat = liouv.matrix
    sol = solve_ivp(lambda _t, y: mat @ y, (0.0, t_end), v0,
                    method="DOP853", t_eval=tau_grid, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationFailureError(f"propagation failed: {sol.message}")
    for k in range(tau_grid.size):
        out[k] = unvectorize(sol.y[:, k], liouv.dim)
    return out


def bus_output_operator(space: HilbertSpace, params: SystemParams) -> np.ndarray:
    """B = sqrt(flux_in) 1 - sqrt(2 kappa_bus) a (units: sqrt(photons/us))."""
    return (np.sqrt(params.flux_in) * identity(space)
            - np.sqrt(2.0 * params.kappa_bus) * annihilation(space))


def drop_output_operator(space: HilbertSpace, params: SystemParams) -> np.ndarray:
    return np.sqrt(2.0 * params.kappa_drop) * annihilation(space)


def transmissions(space: HilbertSpace, params: SystemParams, *,
                  rho_ss: np.ndarray | None = None) -> tuple[float, float, float]:
    """Steady-state (T_bus, T_drop, loss); the three sum to one exactly.

    Requires flux_in > 0 for the normalization.
    """
    if params.flux_in <= 0:
        raise InvalidArgumentError("transmissions require flux_in > 0")
    if rho_ss is None:
        rho_ss = steady_state(build_liouvillian(space, params))
    n_ph = expectation(number_operator(space), rho_ss).real
    p_e = expectation(atom_excitation(space), rho_ss).real
    b = bus_output_operator(space, params)
    t_bus = expectation(b.conj().T @ b, rho_ss).real / params.flux_in
    t_drop = 2.0 * params.kappa_drop * n_ph / params.flux_in
    loss = (2.0 * params.kappa_i * n_ph + 2.0 * params.gamma * p_e) / params.flux_in
    return float(t_bus), float(t_drop), float(loss)


def spectrum(space: HilbertSpace, params: SystemParams,
             detuning_grid_mhz: np.ndarray) -> Spectrum:
    """Transmission spectrum versus detuning, scanned with delta_al = delta_rl.

    The laser is scanned across the common resonator/atom resonance, so both
    detunings move together.  Points are independent; per-point failures are
    re-raised with the grid index attached.
    """
    grid = np.asarray(detuning_grid_mhz, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise InvalidArgumentError("detuning grid must be a finite nonempty 1-d array")
    t_bus = np.empty(grid.size)
    t_drop = np.empty(grid.size)
    loss = np.empty(grid.size)
    for i, d_mhz in enumerate(grid):
        delta = TWO_PI * d_mhz
        p = params.replace(delta_rl=delta, delta_al=delta)
        try:
            t_bus[i], t_drop[i], loss[i] = transmissions(space, p)
        except (InvalidArgumentError, SolverDegenerateError, TruncationError) as exc:
            raise type(exc)(
                f"spectrum point {i} (detuning {d_mhz} MHz): {exc}") from exc
    return Spectrum(detuning_mhz=grid.copy(), t_bus=t_bus, t_drop=t_drop, loss=loss)


def _port_operator(space: HilbertSpace, params: SystemParams, port: str) -> np.ndarray:
    if port == "bus":
        return bus_output_operator(space, params)
    if port == "drop":
        return drop_output_operator(space, params)
    raise InvalidArgumentError(f"port must be 'bus' or 'drop', got {port!r}")


def g2_raw(space: HilbertSpace, params: SystemParams, port: str,
           tau_grid: np.ndarray, *, rho_ss: np.ndarray | None = None,
           rtol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Unnormalized G2(tau) = <B+B(tau) B+B(0)> and the mean flux <B+B>.

    Evaluated by the quantum regression theorem: the seed B rho_ss B+ is
    propagated with the full generator and read out with B+B.  The default
    tolerance is tighter than for plain propagation because the bus readout
    is a small difference of drive-scale terms; the integration error is
    controlled by the seed norm, not by the readout.
    """
    liouv = build_liouvillian(space, params)
    if rho_ss is None:
        rho_ss = steady_state(liouv)
    b = _port_operator(space, params, port)
    bdb = b.conj().T @ b
    flux = expectation(bdb, rho_ss).real
    seed = b @ rho_ss @ b.conj().T
    states = propagate_grid(liouv, seed, tau_grid, rtol=rtol)
    g2 = np.array([expectation(bdb, states[k]).real for k in range(len(states))])
    return g2, float(flux)


def g2_curve(space: HilbertSpace, params: SystemParams, port: str,
             tau_grid: np.ndarray, *, rho_ss: np.ndarray | None = None,
             rtol: float = 1e-10) -> G2Curve:
    """Normalized g2(tau) for one output port; tends to 1 for tau >> 1/kappa."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    raw, flux = g2_raw(space, params, port, tau_grid, rho_ss=rho_ss, rtol=rtol)
    if flux < 1e-30:
        raise UndefinedCorrelationError(
            f"mean {port} flux {flux:.3e} photons/us is too small to normalize g2")
    return G2Curve(port=port, tau_us=tau_grid.copy(), values=raw / flux**2)
