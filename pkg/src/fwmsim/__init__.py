"""Gaussian-state simulator for dual-pump four-wave mixing."""

from .errors import (
    DimensionGuard,
    DimensionMismatch,
    FWMError,
    IndexOutOfRange,
    InvalidPartition,
    NonRealSpectrum,
    NonSymplectic,
    NoSolution,
    OutOfRange,
    ZeroVector,
)
from .gaussian import GaussianState, apply_loss, evolve, symplectic_residual, vacuum_state
from .geometry import (
    CALIBRATED_DISPERSION,
    CandidateConfig,
    ConfigKind,
    DispersionParams,
    ModeGeometry,
    PumpConfig,
    Wavevector,
    cone_half_angle,
    enumerate_candidate_configs,
    phase_mismatch,
    solve_four_mode_geometry,
)
from .interaction import (
    CouplingGraph,
    compare_configurations,
    coupling_graph_from_powers,
    gain_spectrum,
    hamiltonian_generator,
    symmetric_graph,
)
from .metrics import (
    correlation_graph,
    joint_quadrature_variance,
    log_negativity,
    mean_photon_numbers,
    two_mode_squeezing,
)
from .oracle import fock_covariance, fock_evolve, oracle_compare

__version__ = "0.1.0"
