import numpy as np
import pytest

from atomswitch import (
    GDistribution,
    InvalidArgumentError,
    conditioned_on_survival,
    contrast_db,
    entangled_state,
    evaluate_operating_point,
    fidelity,
    kappa_sweep,
    negativity,
    partial_transpose,
    projection_scenario,
    recovery,
)
from atomswitch.lindblad import TWO_PI

from conftest import GAMMA_MHZ, KAPPA_I_MHZ


def test_fidelity_trivials_and_reference_point():
    assert fidelity(1.0, 1.0) == 1.0
    assert fidelity(0.0, 0.0) == 0.0
    # measured OFF-state bus transmission with the ideal ON-state drop value
    assert fidelity(0.46, 0.806) == pytest.approx(0.633)


def test_fidelity_rejects_out_of_range():
    with pytest.raises(InvalidArgumentError):
        fidelity(1.2, 0.5)
    with pytest.raises(InvalidArgumentError):
        fidelity(0.5, -0.1)


def test_fidelity_and_recovery_are_monotone():
    rng = np.random.default_rng(21)
    for _ in range(50):
        a, b, c, d = rng.uniform(0, 1, size=4)
        eps = rng.uniform(0, 1 - max(a, b, c, d) + 1e-12) * 0.5
        assert fidelity(min(a + eps, 1), b) >= fidelity(a, b)
        assert recovery(min(a + eps, 1), b, c, d) >= recovery(a, b, c, d)


def test_recovery_trivials():
    assert recovery(0.5, 0.5, 0.5, 0.5) == pytest.approx(1.0)
    assert recovery(0.0, 0.0, 0.0, 0.0) == 0.0


def test_contrast_reference_values():
    # 3% -> 46% on the bus is an 11.86 dB increase; 58% -> 12% on the drop
    # is a 6.84 dB decrease
    assert contrast_db(0.03, 0.46, "increase") == pytest.approx(11.8564, abs=1e-3)
    assert contrast_db(0.58, 0.12, "decrease") == pytest.approx(6.8425, abs=1e-3)
    assert contrast_db(0.3, 0.3, "increase") == 0.0


def test_contrast_rejects_nonpositive_and_bad_direction():
    with pytest.raises(InvalidArgumentError):
        contrast_db(0.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        contrast_db(0.5, 0.5, "sideways")


# ---------------------------------------------------------------------------
# entangled state and negativity

def bell_state_2x3():
    psi = np.zeros(6, dtype=complex)
    psi[0] = psi[4] = 1 / np.sqrt(2)   # (|c,bus> + |u,drop>)/sqrt(2)
    return np.outer(psi, psi.conj())


def test_ideal_switch_gives_bell_state():
    rho = entangled_state((1.0, 0.0), (0.0, 1.0))
    np.testing.assert_allclose(rho, bell_state_2x3(), atol=1e-15)
    assert negativity(rho) == pytest.approx(1.0, abs=1e-12)


def test_all_zero_amplitudes_give_unentangled_loss_state():
    rho = entangled_state((0.0, 0.0), (0.0, 0.0))
    assert np.trace(rho).real == pytest.approx(1.0)
    assert negativity(rho) == pytest.approx(0.0, abs=1e-12)


def test_entangled_state_rejects_super_unit_amplitudes():
    with pytest.raises(InvalidArgumentError):
        entangled_state((1.0, 0.2), (0.0, 1.0))


def test_reference_point_negativity():
    # measured transmissions at the optimum coupler setting
    rho = entangled_state((np.sqrt(0.46), np.sqrt(0.12)), (0.0, np.sqrt(0.806)))
    n = negativity(rho)
    assert n == pytest.approx(0.61, abs=0.10)
    # independent route to the trace norm: singular values of rho^Gamma
    pt = partial_transpose(rho, (2, 3), 0)
    n_svd = np.linalg.svd(pt, compute_uv=False).sum() - 1.0
    assert n == pytest.approx(n_svd, abs=1e-10)


def test_negativity_convention_two_qubit_bell_is_one():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert negativity(rho, dims=(2, 2)) == pytest.approx(1.0, abs=1e-12)


def test_negativity_zero_for_random_separable_states():
    rng = np.random.default_rng(22)
    for _ in range(100):
        rho = np.zeros((6, 6), dtype=complex)
        for _k in range(4):
            p = rng.dirichlet(np.ones(4))[0]
            va = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            vb = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            va /= np.linalg.norm(va)
            vb /= np.linalg.norm(vb)
            rho += p * np.kron(np.outer(va, va.conj()), np.outer(vb, vb.conj()))
        rho /= np.trace(rho).real
        assert negativity(rho) < 1e-8


def test_negativity_invariant_under_local_unitaries():
    rng = np.random.default_rng(23)
    rho = entangled_state((np.sqrt(0.46), np.sqrt(0.12)), (0.0, np.sqrt(0.806)))
    n0 = negativity(rho)
    for _ in range(10):
        qa, _ = np.linalg.qr(rng.standard_normal((2, 2))
                             + 1j * rng.standard_normal((2, 2)))
        qb, _ = np.linalg.qr(rng.standard_normal((3, 3))
                             + 1j * rng.standard_normal((3, 3)))
        u = np.kron(qa, qb)
        assert negativity(u @ rho @ u.conj().T) == pytest.approx(n0, abs=1e-10)


def test_negativity_rejects_invalid_states():
    with pytest.raises(InvalidArgumentError):
        negativity(np.eye(6))          # trace 6
    with pytest.raises(InvalidArgumentError):
        negativity(np.eye(5) / 5, dims=(2, 3))


def test_conditioned_on_survival_removes_loss_sector():
    rho = entangled_state((np.sqrt(0.3), 0.0), (0.0, np.sqrt(0.5)))
    cond = conditioned_on_survival(rho)
    assert np.trace(cond).real == pytest.approx(1.0)
    assert cond[2, 2].real == pytest.approx(0.0, abs=1e-15)
    assert cond[5, 5].real == pytest.approx(0.0, abs=1e-15)
    assert negativity(cond) > negativity(rho)


# ---------------------------------------------------------------------------
# operating-point pipeline

def test_operating_point_metrics_reference(space4, g_dist):
    res = evaluate_operating_point(space4, TWO_PI * KAPPA_I_MHZ, TWO_PI * 25.0,
                                   TWO_PI * 20.0, TWO_PI * GAMMA_MHZ, g_dist,
                                   flux_in=0.01)
    m = res.metrics
    assert m.fidelity == pytest.approx(0.62, abs=0.08)
    assert m.negativity == pytest.approx(0.61, abs=0.10)
    assert m.n0 == pytest.approx(1.2278, abs=1e-3)
    assert 0.0 <= m.recovery <= 1.0
    assert res.t_bus_at + res.t_drop_at + res.loss_at == pytest.approx(1.0, abs=1e-8)


def test_operating_point_negativity_stays_weak_drive(space4, space6, g_dist):
    args = (TWO_PI * KAPPA_I_MHZ, TWO_PI * 25.0, TWO_PI * 20.0,
            TWO_PI * GAMMA_MHZ, g_dist)
    weak = evaluate_operating_point(space4, *args, flux_in=0.01)
    strong = evaluate_operating_point(space6, *args, flux_in=17.5,
                                      linear_flux_in=0.01)
    assert strong.metrics.negativity == pytest.approx(weak.metrics.negativity,
                                                      abs=1e-6)
    assert strong.t_bus_at != pytest.approx(weak.t_bus_at, abs=1e-3)


def test_kappa_sweep_row_consistency(space4, g_dist):
    rows = kappa_sweep(space4, TWO_PI * KAPPA_I_MHZ, TWO_PI * 1.7,
                       TWO_PI * GAMMA_MHZ, TWO_PI * np.array([10.0, 20.0]),
                       g_dist, flux_in=0.01)
    assert len(rows) == 2
    for r in rows:
        # bus coupler solved to criticality: h-inclusive formula
        want = np.hypot(r.kappa_i + r.kappa_drop, TWO_PI * 1.7)
        assert r.kappa_bus == pytest.approx(want, rel=1e-12)
        assert r.metrics.fidelity == pytest.approx(
            0.5 * (r.t_bus_at + r.t_drop_0), abs=1e-12)


def test_projection_scenario_improves_conditional_figures(space4):
    res = projection_scenario(space4, TWO_PI * KAPPA_I_MHZ, TWO_PI * 20.0,
                              TWO_PI * 1.7, TWO_PI * GAMMA_MHZ, TWO_PI * 30.0,
                              quality_factor_ratio=5.0, flux_in=0.01)
    assert res.kappa_i == pytest.approx(TWO_PI * KAPPA_I_MHZ / 5.0)
    assert res.fidelity_conditional >= res.fidelity_raw
    assert res.negativity_conditional >= res.negativity_raw
    assert res.fidelity_conditional >= 0.95
    assert res.negativity_conditional >= 0.95
    with pytest.raises(InvalidArgumentError):
        projection_scenario(space4, 1.0, 1.0, 0.0, 1.0, 1.0,
                            quality_factor_ratio=0.0)
