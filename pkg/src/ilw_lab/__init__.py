"""Spectral laboratory for finite-depth dispersive flows on the circle.

The package models the finite-depth internal-wave equation as a
perturbation of its deep-water limit: periodic grids and Sobolev norms
(`spectral`), the dispersive and smoothing multipliers (`symbols`),
exponential time integration with conserved-quantity monitors
(`evolution`), explicit traveling waves and their degenerate limits
(`waves`), the truncated Hardy-space Lax matrix with its resolvent
functionals (`lax`), and deterministic batch experiments behind the
``ilw-lab`` command (`experiments`, `cli`).
"""

from .errors import BlowUpError, ContractError, KappaTooSmallError, NumericalError
from .evolution import (
    EvolutionProblem,
    Trajectory,
    default_dt,
    evolve,
    galilean,
    hamiltonian_bo,
    hamiltonian_ilw,
    make_bo,
    make_bo_two_speed,
    make_ilw,
    make_two_depth,
    mass,
    relative_drift,
    rhs,
)
from .experiments import (
    ExperimentConfig,
    RunReport,
    load_config,
    random_field,
    read_snapshot,
    run,
    write_snapshot,
)
from .lax import (
    AprioriBound,
    FlowDerivative,
    GrowthReport,
    KappaCheck,
    LaxSpectrum,
    LaxTruncation,
    WeightedFormProfile,
    WeightedFormRule,
    apriori_bound,
    build_lax,
    build_weighted_rule,
    check_kappa,
    form_flow_derivative,
    gronwall_experiment,
    modes_to_xi_max,
    resolvent_form,
    resolvent_form_gradient,
    resolvent_solve,
    resolvent_state,
    weighted_resolvent_form,
)
from .spectral import (
    RealField,
    SobolevIndex,
    SpectralGrid,
    forward_transform,
    hardy_embed,
    hardy_norm,
    hardy_project,
    multiplier_apply,
    sobolev_norm,
    synthesize,
)
from .symbols import (
    SmoothingScan,
    apply_smoothing_dx,
    coth_symbol,
    depth_dispersion_symbol,
    hilbert_symbol,
    smoothing_operator_scan,
    smoothing_symbol,
)
from .waves import (
    IllposedObservables,
    PeriodicWaveConstants,
    PeriodicWaveProfiles,
    WaveParams,
    dirac_norm_sq,
    distance_to_dirac,
    illposed_observables,
    line_profile,
    line_profile_fourier,
    mode_phase_rate,
    periodic_profile,
    periodic_speed,
    periodic_wave_constants,
    traveling_mode_2pi,
    traveling_residual,
    wave_coth_image,
    wave_number_from_speed,
)

__version__ = "0.1.0"
