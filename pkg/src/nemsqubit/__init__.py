"""nemsqubit: simulator and analysis toolkit for the buckled-plate NEMS qubit.

Subpackages by concern:

- grids, schrodinger: discretization, eigensolving, Crank-Nicolson propagation
- doublewell: stationary double-well analysis (spectra, splitting, well states)
- control: tanh pulse schedules, gate protocols, calibration
- gates: ideal gate library, composition, fidelity, reconstruction
- coupling: capacitive two-plate coupling and 2D phase-model verification
- mechanics: buckled-plate elasticity, natural units, feasibility
- cli: operator-facing command line with persisted run records
"""

__version__ = "0.1.0"

from .coupling import (
    CornerEnergies,
    CouplingParams,
    corner_energies,
    ising_gate_time,
    landscape_2d,
    pair_potential,
    verify_phase_model_2d,
)
from .control import (
    CalibrationResult,
    PhaseGateResult,
    ProtocolResult,
    PulseSchedule,
    calibrate_gate,
    phase_gate_run,
    run_protocol,
    scan_t2,
    schedule_value,
)
from .doublewell import (
    DoubleWellParams,
    FIELD_UNIT,
    HarmonicApprox,
    ScanResult,
    SplittingResult,
    default_grid,
    gaussian_state,
    potential_value,
    spectrum_scan,
    splitting,
)
from .errors import (
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    GeometryError,
    NemsqubitError,
    StabilityError,
)
from .gates import (
    QubitBasis,
    ReconstructedGate,
    compose,
    fidelity,
    ideal_gate,
    reconstruct_gate,
    two_qubit_phase_gate,
)
from .grids import SpatialGrid, WavefunctionState, build_grid, inner, mirror, observe
from .mechanics import (
    NaturalUnits,
    PlateGeometry,
    QuarticFit,
    arc_length,
    buckled_profile,
    feasibility_report,
    hooke_potential,
    natural_units,
    quartic_fit,
)
from .schrodinger import (
    EigenResult,
    PropagationResult,
    TridiagonalOperator,
    discretize_hamiltonian,
    eigensolve,
    propagate,
)
