"""Landau-Zener transitions of a qubit coupled to transverse-field Ising/XY chains.

Closed-form flip probabilities from the chain's quasiparticle spectrum,
parameter sweeps exposing the lambda = 1 quantum-critical signatures, and a
brute-force Schrodinger-propagation oracle for small chains.
"""

from .chain import (
    ChainSpec,
    GaplessModeError,
    GroundMoments,
    Mode,
    Spectrum,
    bogoliubov,
    dispersion,
    ground_moments,
    momenta,
    spectrum,
)
from .lz import (
    LZParams,
    LZResult,
    chain_driven_probability,
    gamma_squared,
    lz_probability,
    standard_lz,
)
from .oracle import (
    ChainGroundState,
    ConvergenceReport,
    DimensionCapError,
    NonConvergentError,
    NormBudgetExceededError,
    OracleConfig,
    OracleResult,
    build_hamiltonian,
    chain_ground_state,
    chain_hamiltonian,
    check_convergence,
    propagate,
    round_trip_fidelity,
    total_sx,
)
from .sweep import (
    Axis,
    CriticalReport,
    GridSpec,
    SweepTable,
    central_derivative,
    locate_critical,
    run_sweep,
    sharpness_scaling,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "ChainGroundState",
    "ChainSpec",
    "ConvergenceReport",
    "CriticalReport",
    "DimensionCapError",
    "GaplessModeError",
    "GridSpec",
    "GroundMoments",
    "LZParams",
    "LZResult",
    "Mode",
    "NonConvergentError",
    "NormBudgetExceededError",
    "OracleConfig",
    "OracleResult",
    "Spectrum",
    "SweepTable",
    "bogoliubov",
    "build_hamiltonian",
    "central_derivative",
    "chain_driven_probability",
    "chain_ground_state",
    "chain_hamiltonian",
    "check_convergence",
    "dispersion",
    "gamma_squared",
    "ground_moments",
    "locate_critical",
    "lz_probability",
    "momenta",
    "propagate",
    "round_trip_fidelity",
    "run_sweep",
    "sharpness_scaling",
    "spectrum",
    "standard_lz",
    "total_sx",
]
