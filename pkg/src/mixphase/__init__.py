"""Uhlmann holonomy, dynamic phases and incompatibility witnesses for mixed states."""

from .dynamics import (
    FlowGenerator,
    HamiltonianPath,
    WitnessReport,
    adiabatic_generator,
    constant_path,
    dynamic_phase_constant,
    dynamic_phase_general,
    dynamic_phase_quasistatic,
    incompatibility_witness,
    uhlmann_flow_generator,
    von_neumann_evolve,
)
from .errors import (
    BetaTooLarge,
    BetaZero,
    ConfigInvalid,
    DimMismatch,
    GapClosure,
    MixPhaseError,
    NoConvergence,
    NotAResolution,
    NotClosed,
    NotHermitian,
    NotNormalized,
    NotPSD,
    NumericFailure,
    RankDeficient,
    TruncationInsufficient,
    VanishingOverlap,
    ZeroMagnitude,
)
from .experiments import (
    ResultRow,
    ResultTable,
    SweepConfig,
    WitnessSummary,
    load_config,
    render,
    run,
    witness_demo,
)
from .holonomy import (
    ConnectionSample,
    ParamLoop,
    berry_phase_discrete,
    curvature_triviality_check,
    discrete_parallel_transport,
    uhlmann_connection_sample,
    uhlmann_holonomy,
    uhlmann_phase,
)
from .linalg import (
    EigenSystem,
    eig_hermitian,
    matrix_exp,
    matrix_inv_sqrt_pd,
    matrix_sqrt_psd,
    ordered_product,
    polar_decompose,
    principal_arg,
)
from .models import (
    KitaevSpec,
    OscillatorSpec,
    SSHSpec,
    brillouin_loop,
    continuum_theta_d,
    kitaev_theta_d,
    oscillator_theta_d,
    oscillator_theta_d_numeric,
    ssh_theta_d,
    two_band_hamiltonian,
    two_band_theta_d_numeric,
    two_band_theta_d_unordered,
)
from .states import (
    Amplitude,
    DensityMatrix,
    bures_hs_distance,
    fidelity,
    fubini_study_distance,
    hs_inner,
    parallel_gauge,
    purify,
    regularize,
    thermal_state,
)

__version__ = "0.1.0"
