import pytest

from atomswitch import GDistribution, SystemParams, build_space
from atomswitch.lindblad import TWO_PI

# reference coupler setting used throughout: intrinsic loss 4.8 MHz, drop
# coupler 20 MHz, bus coupler at the h = 0 critical value
KAPPA_I_MHZ = 4.8
KAPPA_DROP_MHZ = 20.0
KAPPA_BUS_MHZ = KAPPA_I_MHZ + KAPPA_DROP_MHZ
H_MHZ = 1.7
GAMMA_MHZ = 3.0
G_MHZ = 15.6


@pytest.fixture(scope="session")
def space4():
    return build_space(4)


@pytest.fixture(scope="session")
def space6():
    return build_space(6)


@pytest.fixture(scope="session")
def weak_params():
    """Critically coupled system with the atom, deep weak-drive regime."""
    return SystemParams.from_mhz(kappa_i=KAPPA_I_MHZ, kappa_bus=KAPPA_BUS_MHZ,
                                 kappa_drop=KAPPA_DROP_MHZ, gamma=GAMMA_MHZ,
                                 g=G_MHZ, flux_in=0.01)


@pytest.fixture(scope="session")
def empty_params(weak_params):
    return weak_params.replace(g=0.0)


@pytest.fixture(scope="session")
def g_dist():
    return GDistribution.from_mhz(15.6, 9.0)


def random_valid_params(rng, flux=0.01):
    return SystemParams(
        kappa_i=TWO_PI * rng.uniform(0.5, 10.0),
        kappa_bus=TWO_PI * rng.uniform(1.0, 40.0),
        kappa_drop=TWO_PI * rng.uniform(1.0, 40.0),
        gamma=TWO_PI * rng.uniform(0.5, 6.0),
        g=TWO_PI * rng.uniform(0.0, 30.0),
        delta_rl=TWO_PI * rng.uniform(-50.0, 50.0),
        delta_al=TWO_PI * rng.uniform(-50.0, 50.0),
        flux_in=flux)
