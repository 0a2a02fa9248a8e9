import numpy as np
import pytest

from atomswitch import (
    InvalidArgumentError,
    SolverDegenerateError,
    SystemParams,
    TruncationError,
    UndefinedCorrelationError,
    annihilation,
    atom_excitation,
    build_hamiltonian,
    build_liouvillian,
    build_space,
    check_density_matrix,
    creation,
    expectation,
    g2_curve,
    ket,
    projector,
    propagate,
    spectrum,
    steady_state,
    transmissions,
    weak_drive_response,
)
from atomswitch.hilbert import ATOM_EXCITED, ATOM_GROUND
from atomswitch.lindblad import (
    TWO_PI,
    Liouvillian,
    drive_amplitude,
    trace_row,
    vectorize,
)

from conftest import random_valid_params


# ---------------------------------------------------------------------------
# Hamiltonian

def test_hamiltonian_vanishes_without_drive_coupling_detuning(space4):
    p = SystemParams(kappa_i=1.0, kappa_bus=2.0, kappa_drop=3.0, gamma=0.5,
                     g=0.0, delta_rl=0.0, delta_al=0.0, flux_in=0.0)
    np.testing.assert_allclose(build_hamiltonian(space4, p), 0.0, atol=1e-15)


def test_hamiltonian_coupling_matrix_element(space4):
    p = SystemParams(kappa_i=1.0, kappa_bus=2.0, kappa_drop=3.0, gamma=0.5,
                     g=TWO_PI * 7.0)
    h = build_hamiltonian(space4, p)
    el = ket(space4, 1, ATOM_GROUND).conj() @ h @ ket(space4, 0, ATOM_EXCITED)
    assert el == pytest.approx(p.g)


def test_hamiltonian_always_hermitian(space4):
    rng = np.random.default_rng(10)
    for _ in range(25):
        p = random_valid_params(rng, flux=rng.uniform(0, 20))
        h = build_hamiltonian(space4, p)
        assert np.abs(h - h.conj().T).max() < 1e-12


def test_drive_amplitude_convention():
    p = SystemParams(kappa_i=0.0, kappa_bus=8.0, kappa_drop=0.0, gamma=0.0,
                     g=0.0, flux_in=2.0)
    assert drive_amplitude(p) == pytest.approx(np.sqrt(2.0 * 8.0 * 2.0))


# ---------------------------------------------------------------------------
# Liouvillian

def test_liouvillian_zero_for_dead_system(space4):
    p = SystemParams(kappa_i=0.0, kappa_bus=0.0, kappa_drop=0.0, gamma=0.0, g=0.0)
    np.testing.assert_allclose(build_liouvillian(space4, p).matrix, 0.0, atol=1e-15)


def test_liouvillian_trace_row_annihilation(space4):
    rng = np.random.default_rng(11)
    for _ in range(10):
        p = random_valid_params(rng, flux=rng.uniform(0, 20))
        liouv = build_liouvillian(space4, p)
        assert np.abs(trace_row(space4.dim) @ liouv.matrix).max() < 1e-10


def test_empty_cavity_amplitude_equation_oracle(space4):
    """d<a>/dt from L must equal -(kappa + i delta)<a> + eta for g = 0."""
    rng = np.random.default_rng(12)
    p = SystemParams(kappa_i=TWO_PI * 2.0, kappa_bus=TWO_PI * 10.0,
                     kappa_drop=TWO_PI * 5.0, gamma=TWO_PI * 3.0, g=0.0,
                     delta_rl=TWO_PI * 7.0, delta_al=TWO_PI * 7.0, flux_in=0.5)
    liouv = build_liouvillian(space4, p)
    a = annihilation(space4)
    eta = drive_amplitude(p)
    # the closed-form equation holds for states supported away from the
    # truncation edge, where [a, a+] = 1
    low = [space4.index(n, s) for n in range(space4.n_max - 1) for s in (0, 1)]
    for _ in range(5):
        m = rng.standard_normal((len(low), len(low))) \
            + 1j * rng.standard_normal((len(low), len(low)))
        sub = m @ m.conj().T
        rho = np.zeros((space4.dim, space4.dim), dtype=complex)
        rho[np.ix_(low, low)] = sub / np.trace(sub)
        drho = (liouv.matrix @ vectorize(rho)).reshape(
            (space4.dim, space4.dim), order="F")
        lhs = expectation(a, drho)
        rhs = -(p.kappa + 1j * p.delta_rl) * expectation(a, rho) + eta
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_liouvillian_build_is_deterministic(space4, weak_params):
    m1 = build_liouvillian(space4, weak_params).matrix
    m2 = build_liouvillian(space4, weak_params).matrix
    assert np.array_equal(m1, m2)


# ---------------------------------------------------------------------------
# steady state

def test_steady_state_undriven_is_vacuum(space4):
    p = SystemParams(kappa_i=TWO_PI * 2.0, kappa_bus=TWO_PI * 10.0,
                     kappa_drop=TWO_PI * 5.0, gamma=TWO_PI * 3.0,
                     g=TWO_PI * 12.0, flux_in=0.0)
    rho = steady_state(build_liouvillian(space4, p))
    np.testing.assert_allclose(rho, projector(space4, 0, ATOM_GROUND), atol=1e-12)


def test_steady_state_weak_drive_photon_number_oracle(space4, empty_params):
    """Empty cavity is exactly coherent: <n> = 2 kb flux / (kappa^2 + delta^2)."""
    for delta_mhz in (0.0, 13.0, -27.0):
        p = empty_params.replace(flux_in=1e-3, delta_rl=TWO_PI * delta_mhz,
                                 delta_al=TWO_PI * delta_mhz)
        rho = steady_state(build_liouvillian(space4, p))
        n = expectation(creation(space4) @ annihilation(space4), rho).real
        want = 2.0 * p.kappa_bus * p.flux_in / (p.kappa**2 + p.delta_rl**2)
        assert n == pytest.approx(want, rel=1e-8)


def test_steady_state_invariants_and_residual(space4, weak_params):
    liouv = build_liouvillian(space4, weak_params.replace(flux_in=17.5))
    rho = steady_state(liouv)
    check_density_matrix(rho)
    assert np.abs(liouv.matrix @ vectorize(rho)).max() < 1e-10


def test_steady_state_truncation_guard(space4):
    p = SystemParams.from_mhz(kappa_i=4.8, kappa_bus=24.8, kappa_drop=20.0,
                              gamma=3.0, flux_in=200.0)
    with pytest.raises(TruncationError, match="n_max"):
        steady_state(build_liouvillian(space4, p))


def test_steady_state_degenerate_system_raises(space4):
    p = SystemParams(kappa_i=0.0, kappa_bus=0.0, kappa_drop=0.0, gamma=0.0, g=0.0)
    with pytest.raises(SolverDegenerateError):
        steady_state(build_liouvillian(space4, p))


# ---------------------------------------------------------------------------
# propagation

def test_propagate_tau_zero_is_identity(space4, weak_params):
    liouv = build_liouvillian(space4, weak_params)
    rho = projector(space4, 1, ATOM_EXCITED)
    np.testing.assert_array_equal(propagate(liouv, rho, 0.0), rho)


def test_propagate_fixed_point(space4, weak_params):
    liouv = build_liouvillian(space4, weak_params)
    rho = steady_state(liouv)
    out = propagate(liouv, rho, 0.37)
    assert np.abs(out - rho).max() < 1e-8


def test_propagate_coherent_amplitude_decay_oracle(space4):
    """Undriven empty cavity: <a>(tau) = <a>(0) exp(-(kappa + i delta) tau)."""
    p = SystemParams(kappa_i=TWO_PI * 2.0, kappa_bus=TWO_PI * 10.0,
                     kappa_drop=TWO_PI * 5.0, gamma=TWO_PI * 3.0, g=0.0,
                     delta_rl=TWO_PI * 9.0, delta_al=TWO_PI * 9.0, flux_in=0.0)
    liouv = build_liouvillian(space4, p)
    psi = ket(space4, 0, ATOM_GROUND) + 0.3 * ket(space4, 1, ATOM_GROUND)
    rho0 = np.outer(psi, psi.conj())
    rho0 /= np.trace(rho0)
    a = annihilation(space4)
    tau = 0.004
    out = propagate(liouv, rho0, tau)
    want = expectation(a, rho0) * np.exp(-(p.kappa + 1j * p.delta_rl) * tau)
    assert expectation(a, out) == pytest.approx(want, rel=1e-7, abs=1e-10)


def test_propagate_preserves_trace_and_hermiticity(space4, weak_params):
    liouv = build_liouvillian(space4, weak_params.replace(flux_in=5.0))
    rho0 = projector(space4, 2, ATOM_GROUND)
    out = propagate(liouv, rho0, 0.05)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-8)
    assert np.abs(out - out.conj().T).max() < 1e-8


def test_propagate_rejects_negative_tau(space4, weak_params):
    liouv = build_liouvillian(space4, weak_params)
    with pytest.raises(InvalidArgumentError):
        propagate(liouv, projector(space4, 0, ATOM_GROUND), -1.0)


# ---------------------------------------------------------------------------
# transmissions

def test_transmissions_empty_cavity_critical_coupling(space4, empty_params):
    t_bus, t_drop, loss = transmissions(space4, empty_params)
    assert abs(t_bus) < 1e-6
    assert t_drop == pytest.approx(0.8064516129, abs=1e-8)
    assert t_drop == pytest.approx(0.806, abs=0.01)
    assert t_bus + t_drop + loss == pytest.approx(1.0, abs=1e-8)


def test_transmissions_with_atom_weak_drive(space4, weak_params):
    t_bus, t_drop, loss = transmissions(space4, weak_params)
    assert t_bus == pytest.approx(0.385098481, abs=1e-3)
    assert t_drop == pytest.approx(0.116106782, abs=1e-3)
    assert t_bus + t_drop + loss == pytest.approx(1.0, abs=1e-8)


def test_transmissions_require_positive_flux(space4, weak_params):
    with pytest.raises(InvalidArgumentError):
        transmissions(space4, weak_params.replace(flux_in=0.0))


def test_flux_conservation_over_random_parameters(space4):
    rng = np.random.default_rng(13)
    for _ in range(15):
        p = random_valid_params(rng, flux=rng.uniform(1e-3, 2.0))
        t_bus, t_drop, loss = transmissions(space4, p)
        assert t_bus + t_drop + loss == pytest.approx(1.0, abs=1e-8)


def test_linear_response_agreement_with_analytics(space4):
    rng = np.random.default_rng(14)
    for _ in range(10):
        p = random_valid_params(rng, flux=1e-3)
        t_bus, t_drop, _ = transmissions(space4, p)
        tb, td = weak_drive_response(p.kappa_i, p.kappa_bus, p.kappa_drop,
                                     p.gamma, p.g, p.delta_rl, p.delta_al)
        assert abs(t_bus - abs(tb) ** 2) <= 0.01 * max(abs(tb) ** 2, 1e-9)
        assert abs(t_drop - abs(td) ** 2) <= 0.01 * max(abs(td) ** 2, 1e-9)


# ---------------------------------------------------------------------------
# spectrum

def test_spectrum_empty_cavity_lorentzian_width(space4, empty_params):
    kappa_mhz = empty_params.kappa / TWO_PI
    grid = np.array([-kappa_mhz, 0.0, kappa_mhz])
    spec = spectrum(space4, empty_params, grid)
    # half width at half maximum of T_drop equals kappa (full width 2 kappa)
    assert spec.t_drop[0] == pytest.approx(spec.t_drop[1] / 2.0, rel=1e-6)
    assert spec.t_drop[2] == pytest.approx(spec.t_drop[1] / 2.0, rel=1e-6)


def test_spectrum_vacuum_rabi_peaks_near_plus_minus_g():
    space = build_space(3)
    p = SystemParams.from_mhz(kappa_i=0.05, kappa_bus=0.55, kappa_drop=0.4,
                              gamma=0.05, g=20.0, flux_in=1e-3)
    grid = np.linspace(-25.0, 25.0, 101)
    spec = spectrum(space, p, grid)
    pos = grid > 0
    neg = grid < 0
    peak_pos = grid[pos][np.argmax(spec.t_drop[pos])]
    peak_neg = grid[neg][np.argmax(spec.t_drop[neg])]
    assert peak_pos == pytest.approx(20.0, abs=1.0)
    assert peak_neg == pytest.approx(-20.0, abs=1.0)


def test_spectrum_symmetric_under_detuning_reflection(space4, weak_params):
    grid = np.linspace(-30.0, 30.0, 13)
    spec = spectrum(space4, weak_params, grid)
    np.testing.assert_allclose(spec.t_bus, spec.t_bus[::-1], atol=1e-9)
    np.testing.assert_allclose(spec.t_drop, spec.t_drop[::-1], atol=1e-9)


def test_spectrum_flux_conservation_per_point(space4, weak_params):
    spec = spectrum(space4, weak_params, np.linspace(-20, 20, 9))
    np.testing.assert_allclose(spec.t_bus + spec.t_drop + spec.loss, 1.0,
                               atol=1e-8)


def test_spectrum_attaches_grid_index_to_failures(space4, weak_params):
    bad = weak_params.replace(flux_in=500.0)
    with pytest.raises(TruncationError, match="spectrum point 0"):
        spectrum(space4, bad, np.array([0.0]))


def test_spectrum_rejects_empty_or_nonfinite_grid(space4, weak_params):
    with pytest.raises(InvalidArgumentError):
        spectrum(space4, weak_params, np.array([]))
    with pytest.raises(InvalidArgumentError):
        spectrum(space4, weak_params, np.array([0.0, np.inf]))


# ---------------------------------------------------------------------------
# g2

def test_g2_empty_cavity_is_coherent(space4):
    p = SystemParams.from_mhz(kappa_i=4.8, kappa_bus=10.0, kappa_drop=20.0,
                              gamma=3.0, flux_in=1.0)
    tau = np.linspace(0.0, 0.05, 21)
    for port in ("bus", "drop"):
        curve = g2_curve(space4, p, port, tau)
        np.testing.assert_allclose(curve.values, 1.0, atol=1e-6)


def test_g2_drop_zero_delay_equals_intracavity_moment(space4, weak_params):
    p = weak_params.replace(flux_in=10.0)
    liouv = build_liouvillian(space4, p)
    rho = steady_state(liouv)
    a = annihilation(space4)
    ad = creation(space4)
    n = expectation(ad @ a, rho).real
    want = expectation(ad @ ad @ a @ a, rho).real / n**2
    curve = g2_curve(space4, p, "drop", np.array([0.0]))
    assert curve.values[0] == pytest.approx(want, rel=1e-9)


def test_g2_single_g_bunching_antibunching_and_tail(space4):
    p = SystemParams.from_mhz(kappa_i=4.8, kappa_bus=24.86, kappa_drop=20.0,
                              gamma=3.0, g=15.6, flux_in=17.5)
    tau = np.linspace(0.0, 0.25, 26)
    drop = g2_curve(space4, p, "drop", tau)
    bus = g2_curve(space4, p, "bus", tau)
    assert drop.values[0] > 1.0
    assert bus.values[0] < 1.0
    assert drop.values[-1] == pytest.approx(1.0, abs=0.02)
    assert bus.values[-1] == pytest.approx(1.0, abs=0.02)
    assert np.all(drop.values > -1e-8)
    assert np.all(bus.values > -1e-8)


def test_g2_undefined_for_dark_port(space4):
    # no drive at all -> steady state is vacuum -> drop flux exactly zero
    p = SystemParams(kappa_i=TWO_PI * 2.0, kappa_bus=TWO_PI * 10.0,
                     kappa_drop=TWO_PI * 5.0, gamma=TWO_PI * 3.0, g=0.0,
                     flux_in=0.0)
    with pytest.raises(UndefinedCorrelationError):
        g2_curve(space4, p, "drop", np.array([0.0, 0.01]))


def test_g2_rejects_unknown_port(space4, weak_params):
    with pytest.raises(InvalidArgumentError):
        g2_curve(space4, weak_params, "add", np.array([0.0]))


# ---------------------------------------------------------------------------
# truncation convergence

def test_truncation_convergence_weak_drive(space4, space6, weak_params):
    t4 = np.array(transmissions(space4, weak_params))
    t6 = np.array(transmissions(space6, weak_params))
    assert np.abs(t4 - t6).max() / np.abs(t6).max() < 1e-6
