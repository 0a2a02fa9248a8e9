"""atomswitch: simulator and analysis toolkit for a four-port fiber-optical
switch controlled by a single atom coupled to a whispering-gallery-mode
resonator.

Core physics lives in :mod:`atomswitch.lindblad` (driven Jaynes-Cummings
master equation), with closed-form oracles in :mod:`atomswitch.analytics`,
coupling-strength ensembles and switch figures of merit in
:mod:`atomswitch.ensemble` and :mod:`atomswitch.metrics`, spectrum fitting in
:mod:`atomswitch.fitting`, and Monte Carlo atom transits in
:mod:`atomswitch.transit`.  Units: angular frequencies in rad/us everywhere
inside the library; configuration and file interfaces use ordinary
frequencies nu = omega/2pi in MHz and times in us.
"""

__version__ = "0.1.0"

from .analytics import (
    CouplerConfig,
    LorentzianShape,
    critical_atom_number,
    critical_kappa_bus,
    empty_cavity_response,
    lorentzian,
    weak_drive_response,
)
from .ensemble import (
    GDistribution,
    ensemble_g2,
    ensemble_spectrum,
    ensemble_transmissions,
    g_grid,
    gaussian_weights,
    spectra_by_g,
)
from .errors import (
    AtomSwitchError,
    ConfigError,
    IntegrationFailureError,
    InvalidArgumentError,
    NumericalError,
    SolverDegenerateError,
    TruncationError,
    UndefinedCorrelationError,
)
from .fitting import (
    FitResult,
    SpectrumData,
    fit_g_distribution,
    fit_lorentzian,
    read_spectrum_data,
)
from .hilbert import (
    HilbertSpace,
    annihilation,
    atom_excitation,
    atom_lowering,
    atom_raising,
    build_space,
    check_density_matrix,
    creation,
    expectation,
    identity,
    ket,
    number_operator,
    projector,
)
from .lindblad import (
    G2Curve,
    Liouvillian,
    Spectrum,
    SystemParams,
    build_hamiltonian,
    build_liouvillian,
    bus_output_operator,
    drive_amplitude,
    drop_output_operator,
    g2_curve,
    propagate,
    spectrum,
    steady_state,
    transmissions,
)
from .metrics import (
    OperatingPointResult,
    ProjectionResult,
    SwitchMetrics,
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
from .transit import (
    AveragedTrace,
    TransitConfig,
    TransitTrace,
    TriggerConfig,
    average_aligned,
    fwhm,
    g_profile,
    simulate_transit,
    simulate_transits,
    transmission_table,
    trigger_fraction,
)
