import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomswitch import (
    CouplerConfig,
    InvalidArgumentError,
    LorentzianShape,
    critical_atom_number,
    critical_kappa_bus,
    empty_cavity_response,
    lorentzian,
    weak_drive_response,
)
from atomswitch.lindblad import TWO_PI

# hand-evaluated oracles for the reference coupler setting
# sqrt((4.8 + 20)^2 + 1.7^2) = sqrt(617.93)
CRITICAL_KB_MHZ = 24.858197842965204
# with kappa_bus = 24.8, kappa = 49.6, g^2/gamma = 15.6^2/3 = 81.12:
# |1 - 49.6/130.72|^2 and |2 sqrt(24.8*20)/130.72|^2
T_BUS_WEAK = 0.385098481
T_DROP_WEAK = 0.116106782
# 2 * 49.8 * 3.0 / 15.6^2 = 207.5/169
N0_REFERENCE = 1.2278106508875740


def test_critical_kappa_bus_reference_value():
    cfg = CouplerConfig(kappa_i=TWO_PI * 4.8, kappa_drop=TWO_PI * 20.0,
                        h=TWO_PI * 1.7)
    kb = critical_kappa_bus(cfg)
    assert kb / TWO_PI == pytest.approx(CRITICAL_KB_MHZ, abs=1e-9)
    assert kb / TWO_PI == pytest.approx(24.86, abs=5e-3)


def test_critical_kappa_bus_reductions():
    assert critical_kappa_bus(CouplerConfig(2.0, 3.0, 0.0)) == pytest.approx(5.0)
    assert critical_kappa_bus(CouplerConfig(2.0, 0.0, 0.0)) == pytest.approx(2.0)


def test_empty_cavity_critical_coupling_extinction():
    ki, kd = TWO_PI * 4.8, TWO_PI * 20.0
    kb = ki + kd
    t_bus, t_drop = empty_cavity_response(ki, kb, kd, 0.0)
    assert abs(t_bus) ** 2 == pytest.approx(0.0, abs=1e-30)
    assert abs(t_drop) ** 2 == pytest.approx(1.0 - 2.0 * ki / (ki + kb + kd),
                                             abs=1e-12)
    assert abs(t_drop) ** 2 == pytest.approx(0.8064516129, abs=1e-9)


def test_empty_cavity_off_resonance_passthrough():
    t_bus, t_drop = empty_cavity_response(1.0, 2.0, 3.0, 1e9)
    assert abs(t_bus - 1.0) < 1e-8
    assert abs(t_drop) < 1e-8


def test_empty_cavity_rejects_dead_resonator():
    with pytest.raises(InvalidArgumentError):
        empty_cavity_response(0.0, 0.0, 0.0, 1.0)


def test_critical_coupling_identity():
    # 4 kb kd / k^2 + 4 kb ki / k^2 = 1 exactly when kb = ki + kd
    rng = np.random.default_rng(3)
    for _ in range(50):
        ki, kd = rng.uniform(0.1, 30.0, size=2)
        kb = ki + kd
        k = ki + kb + kd
        assert 4 * kb * kd / k**2 + 4 * kb * ki / k**2 == pytest.approx(1.0, abs=1e-12)


def test_weak_drive_reduces_to_empty_cavity_at_g_zero():
    delta = np.linspace(-50, 50, 11) * TWO_PI
    got = weak_drive_response(1.0, 2.0, 3.0, 0.5, 0.0, delta, delta)
    want = empty_cavity_response(1.0, 2.0, 3.0, delta)
    np.testing.assert_array_equal(got[0], want[0])
    np.testing.assert_array_equal(got[1], want[1])


def test_weak_drive_reference_point():
    t_bus, t_drop = weak_drive_response(TWO_PI * 4.8, TWO_PI * 24.8, TWO_PI * 20.0,
                                        TWO_PI * 3.0, TWO_PI * 15.6, 0.0, 0.0)
    assert abs(t_bus) ** 2 == pytest.approx(T_BUS_WEAK, abs=1e-6)
    assert abs(t_drop) ** 2 == pytest.approx(T_DROP_WEAK, abs=1e-6)


def test_weak_drive_singularity_guard():
    with pytest.raises(InvalidArgumentError):
        weak_drive_response(1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 0.0)
    # gamma = 0 with detuned atom is finite
    weak_drive_response(1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 5.0)


@settings(max_examples=200, deadline=None)
@given(ki=st.floats(0.01, 30), kb=st.floats(0.01, 60), kd=st.floats(0.0, 60),
       gamma=st.floats(0.01, 10), g=st.floats(0.0, 50),
       d_rl=st.floats(-400, 400), d_al=st.floats(-400, 400))
def test_weak_drive_passivity(ki, kb, kd, gamma, g, d_rl, d_al):
    t_bus, t_drop = weak_drive_response(ki, kb, kd, gamma, g, d_rl, d_al)
    assert abs(t_bus) ** 2 + abs(t_drop) ** 2 <= 1.0 + 1e-12


def test_critical_atom_number_reference_and_scaling():
    n0 = critical_atom_number(TWO_PI * 49.8, TWO_PI * 3.0, TWO_PI * 15.6)
    assert n0 == pytest.approx(N0_REFERENCE, abs=1e-9)
    assert n0 == pytest.approx(1.23, abs=5e-3)
    half = critical_atom_number(TWO_PI * 49.8, TWO_PI * 3.0, 2 * TWO_PI * 15.6)
    assert half == pytest.approx(n0 / 4.0, rel=1e-12)
    # robustness indicator: g^2/(kappa gamma) = 2/N0
    assert (TWO_PI * 15.6) ** 2 / (TWO_PI * 49.8 * TWO_PI * 3.0) == \
        pytest.approx(2.0 / n0, rel=1e-12)


def test_critical_atom_number_rejects_zero_g():
    with pytest.raises(InvalidArgumentError):
        critical_atom_number(1.0, 1.0, 0.0)


def test_lorentzian_shape_values():
    shape = LorentzianShape(center=3.0, half_width=2.0, amplitude=0.5, offset=0.1)
    assert lorentzian(shape, 3.0) == pytest.approx(0.6)
    assert lorentzian(shape, 5.0) == pytest.approx(0.1 + 0.25)
    assert lorentzian(shape, 1.0) == pytest.approx(lorentzian(shape, 5.0))
    with pytest.raises(InvalidArgumentError):
        LorentzianShape(center=0.0, half_width=0.0, amplitude=1.0)
