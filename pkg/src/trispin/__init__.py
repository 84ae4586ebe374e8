"""Steady-state quantum correlations of a boundary-driven three-spin XX chain.

The package builds the chain Hamiltonian and its closed-form
eigensystem, derives the secular master equation for two thermal baths
attached to the end spins, solves for the non-equilibrium steady
state, and evaluates quantum discord, classical correlation, mutual
information and concurrence of spin pairs.  A CLI and a sweep harness
reproduce the standard parameter scans as CSV files and optional
figures.
"""

from .correlations import (
    CorrelationRecord,
    MeasurementAngles,
    SpinPair,
    classical_correlation,
    concurrence,
    conditional_entropy_measured,
    correlation_record,
    mutual_information,
    partial_trace,
    pure_state_pair_correlations,
    quantum_discord,
    trace_distance,
    von_neumann_entropy,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateFrequencyError,
    IntegrationError,
    InvalidParameterError,
    InvalidStateError,
    NonHermitianError,
    NonUniqueSteadyStateError,
    StepSizeError,
    TrispinError,
)
from .lindblad import (
    BathSpec,
    JumpOperator,
    JumpOperatorSet,
    build_jump_operators,
    dissipator,
    evolve_rk4,
    liouvillian_apply,
    liouvillian_matrix,
    occupation_probabilities,
    planck_occupation,
    steady_state,
)
from .spectrum import (
    ChainParams,
    EigenSystem,
    MixingAngles,
    Spectrum,
    analytic_eigensystem,
    build_hamiltonian,
    energy_gap_35,
    mixing_angles,
    numeric_eigensystem,
    transition_frequencies,
)
from .sweep import CorrelationRow, SweepConfig, parse_config, run_sweep

__version__ = "0.1.0"
