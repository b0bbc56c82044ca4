"""Cooling a thermal cavity field to vacuum by dispersive atoms and postselection."""
from .fock import (
    FieldState,
    NotDiagonalError,
    Truncation,
    TruncationError,
    choose_truncation,
    fidelity,
    fock_state,
    mean_photon,
    nbar_from_temperature,
    photon_distribution,
    temperature_from_nbar,
    thermal_state,
    vacuum_fidelity,
)
from .lindblad import IntegratorError, OpenRunResult, PhysicalParams, best_thermal_fit, run_open_protocol
from .protocol import (
    CoolingResult,
    PhaseSequence,
    PostselectionError,
    PostselectionSpec,
    asymptotic_success,
    cool_to_vacuum,
    dyadic_sequence,
    fidelity_sweep,
    postselect_evolve,
    postselect_pattern,
    single_atom_filter,
    survivors,
)
from .wigner import PhaseGrid, thermal_wigner_analytic, wigner_diagonal

__version__ = "0.1.0"
