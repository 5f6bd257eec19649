"""Coupling engineering and bending-loss analysis for bent 2D waveguide arrays."""
from .analysis import ExperimentConfig, run_experiment, spectrum_spacings, table1_report
from .coupling import (
    CouplingLaw,
    PairGeometry,
    anisotropy_scan,
    coupling_analytic,
    coupling_law,
    coupling_quadrature,
    fit_exponential,
    fold_angle,
)
from .defect_opt import (
    DefectResult,
    detuning_to_index_change,
    detuning_to_size_change,
    optimize_detuning,
)
from .errors import (
    BentLatticeError,
    ConfigError,
    ConvergenceError,
    NoGuidedModeError,
    NonHermitianError,
    NotNormalizedError,
    UnreachableTargetError,
)
from .lattice import (
    LatticeHamiltonian,
    LatticeLayout,
    beyond_nn_ratio,
    build_layout,
    coupling_matrix,
    pst_profile,
    relative_coupling_map,
    solve_separation,
)
from .mode_solver import (
    CONSTANTS,
    ModeSolution,
    PhysicalConstants,
    WaveguideSpec,
    field_at,
    normalize_power,
    solve_mode,
    transverse_wavenumber,
)
from .propagation import (
    TransferReport,
    corner_power_trace,
    evolve,
    evolve_ode,
    output_intensity_map,
    power_distribution,
    transfer_loss,
)

__version__ = "0.1.0"
