"""Frequency Schmidt-mode simulator for bright squeezed vacuum.

Models parametric down-conversion in a single crystal or in an SU(1,1)
nonlinear interferometer with a group-velocity-dispersion medium, and
computes spectral and statistical observables of the generated light as
functions of parametric gain, dispersion and geometry.
"""

__version__ = "0.1.0"

from .dispersion import (  # noqa: F401
    Geometry,
    InterferometerMedia,
    PhaseMatchedCrystal,
    crystal_mismatch,
    find_pump_path,
    interferometer_phase,
)
from .jsa import (  # noqa: F401
    FrequencyGrid,
    JointSpectralAmplitude,
    PumpConfig,
    build_interferometer_tpa,
    build_single_crystal_tpa,
    phase_lock,
)
from .materials import (  # noqa: F401
    Material,
    MaterialTable,
    d2k_domega2,
    dk_domega,
    group_index,
    group_velocity,
    load_material_table,
    refractive_index,
    wavevector,
)
from .observables import (  # noqa: F401
    BandMoments,
    Peak,
    SpectralBand,
    Spectrum,
    band_covariance,
    band_moments,
    find_peaks,
    fwhm,
    g2_integral,
    nrf,
    spectrum,
)
from .schmidt import (  # noqa: F401
    GainState,
    SchmidtDecomposition,
    decompose,
    gain_state,
    pair_superpositions,
    redistribute,
    schmidt_number,
)
from .scenario import (  # noqa: F401
    ScenarioConfig,
    SweepSpec,
    analytic_period,
    load_scenario,
    parse_scenario,
    resolve_scenario,
    run_scenario,
    run_sweep,
    validate_config,
)
