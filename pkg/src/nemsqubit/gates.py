"""Qubit-level gate algebra: ideal gate library, composition, trace
fidelity, and reconstruction of 2x2 gates from propagation runs.

Gates are plain complex ndarrays.  Comparison is always modulo global
phase via fidelity(U, V) = |tr(U^dag V)| / dim, matching how the physical
protocols define gates only up to an overall dynamical phase.

Conventions: |0> is the right-localized state psi_plus, |1> the
left-localized psi_minus; two-qubit basis order is |00>, |01>, |10>, |11>
with the first qubit as the control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .doublewell import DoubleWellParams, gaussian_state
from .errors import ConfigError
from .grids import SpatialGrid, WavefunctionState, inner

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

RECONSTRUCTION_LEAKAGE_LIMIT = 0.05


def z_rotation(theta: float) -> np.ndarray:
    """U_Z(theta) = diag(e^{-i theta/2}, e^{+i theta/2}) = exp(-i theta sigma_z / 2)."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def zz_rotation(theta: float) -> np.ndarray:
    """exp(-i theta Z(x)Z / 2) on two qubits."""
    half = np.exp(-0.5j * theta)
    return np.diag([half, half.conjugate(), half.conjugate(), half])


def sqrt_not(sign: int = +1) -> np.ndarray:
    """(e^{i pi/4} I +- e^{-i pi/4} sigma_x)/sqrt(2); squares to +-sigma_x."""
    return (np.exp(0.25j * np.pi) * I2 + sign * np.exp(-0.25j * np.pi) * SIGMA_X) / math.sqrt(2.0)


_FIXED_GATES = {
    "identity": lambda: I2.copy(),
    "not": lambda: SIGMA_X.copy(),
    "x": lambda: SIGMA_X.copy(),
    "y": lambda: SIGMA_Y.copy(),
    "z": lambda: SIGMA_Z.copy(),
    "sqrt_not_plus": lambda: sqrt_not(+1),
    "sqrt_not_minus": lambda: sqrt_not(-1),
    "t": lambda: np.diag([1.0, np.exp(0.25j * np.pi)]),
    "hadamard": lambda: (SIGMA_Z + SIGMA_X) / math.sqrt(2.0),
    "h": lambda: (SIGMA_Z + SIGMA_X) / math.sqrt(2.0),
    "ising": lambda: np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex),
    "cz": lambda: np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex),
    "cnot": lambda: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}

_ANGLE_GATES = {"z_rotation": z_rotation, "zz_rotation": zz_rotation}


def ideal_gate(name: str, angle: float | None = None) -> np.ndarray:
    """Exact gate matrix by identifier.

    Fixed gates: identity, not/x, y, z, sqrt_not_plus, sqrt_not_minus, t,
    hadamard/h, ising, cz, cnot.  Angle gates: z_rotation, zz_rotation.
    """
    key = name.lower()
    if key in _ANGLE_GATES:
        if angle is None:
            raise ConfigError(f"gate {name!r} requires an angle")
        return _ANGLE_GATES[key](angle)
    if key in _FIXED_GATES:
        if angle is not None:
            raise ConfigError(f"gate {name!r} takes no angle")
        return _FIXED_GATES[key]()
    raise ConfigError(f"unknown gate identifier {name!r}")


def fidelity(U: np.ndarray, V: np.ndarray) -> float:
    """|tr(U^dag V)| / dim; 1 iff U = e^{i phi} V for unitaries."""
    U = np.asarray(U)
    V = np.asarray(V)
    if U.shape != V.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ConfigError(f"fidelity needs equal square matrices, got {U.shape} vs {V.shape}")
    return float(abs(np.trace(U.conj().T @ V)) / U.shape[0])


def unitarity_defect(U: np.ndarray) -> float:
    """max |(U^dag U - I)_ij|; zero for exact unitaries."""
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def lift_to_two_qubits(gate: np.ndarray, qubit: int) -> np.ndarray:
    """Tensor a one-qubit gate with identity; qubit 0 is the first factor."""
    if gate.shape != (2, 2):
        raise ConfigError("only 2x2 gates can be lifted")
    if qubit == 0:
        return np.kron(gate, I2)
    if qubit == 1:
        return np.kron(I2, gate)
    raise ConfigError(f"qubit index must be 0 or 1, got {qubit}")


def compose(
    gates: Sequence[np.ndarray], placements: Sequence[int | None] | None = None
) -> np.ndarray:
    """Matrix for applying ``gates`` in listed order (first entry first).

    ``placements[i]`` lifts a one-qubit gate onto qubit 0 or 1 of a
    two-qubit register; None leaves the matrix as given.  All matrices
    must agree in dimension after lifting.
    """
    if not gates:
        raise ConfigError("compose needs at least one gate")
    if placements is None:
        placements = [None] * len(gates)
    if len(placements) != len(gates):
        raise ConfigError("one placement per gate required")
    lifted = []
    for g, p in zip(gates, placements):
        g = np.asarray(g, dtype=complex)
        lifted.append(g if p is None else lift_to_two_qubits(g, p))
    dim = lifted[0].shape[0]
    if any(m.shape != (dim, dim) for m in lifted):
        raise ConfigError("composed gates must share one dimension after placement")
    out = np.eye(dim, dtype=complex)
    for m in lifted:
        out = m @ out
    return out


def two_qubit_phase_gate(EX: float, t: float, U0: float = 0.0) -> np.ndarray:
    """Diagonal evolution of the coupled pair over time t.

    The corner-energy table puts E+ = U0 - EX on |01> (= |+->) and
    E- = U0 + EX on |10>, so up to the global factor e^{-i U0 t} the gate
    is diag(1, e^{+i EX t}, e^{-i EX t}, 1); at EX t = pi it reduces to the
    Ising gate diag(1, -1, -1, 1).
    """
    phase = np.exp(1j * EX * t)
    return np.exp(-1j * U0 * t) * np.diag([1.0, phase, np.conj(phase), 1.0])


@dataclass
class QubitBasis:
    """The two localized Gaussian well states spanning the qubit."""

    psi_plus: WavefunctionState
    psi_minus: WavefunctionState

    @classmethod
    def for_params(cls, params: DoubleWellParams, grid: SpatialGrid) -> "QubitBasis":
        return cls(
            psi_plus=gaussian_state(params, "plus", grid),
            psi_minus=gaussian_state(params, "minus", grid),
        )

    def overlap(self) -> float:
        """|<psi_plus|psi_minus>|; below 1e-6 for A >= 2.5."""
        return abs(inner(self.psi_plus, self.psi_minus))


@dataclass
class ReconstructedGate:
    """2x2 matrix assembled from the two initial-condition runs.

    ``leakage[j]`` = 1 - (column j norm)^2 is the terminal population
    outside span{psi_plus, psi_minus}; above 5% the two-level description
    is considered violated and ``reliable`` is false.
    """

    matrix: np.ndarray
    leakage: tuple[float, float]
    reliable: bool


def reconstruct_gate(run_plus, run_minus, basis: QubitBasis) -> ReconstructedGate:
    """Project the terminal states of a plus-start and a minus-start run
    onto the qubit basis; columns are (<+|out>, <-|out>) per initial side."""
    grid = basis.psi_plus.grid
    for run in (run_plus, run_minus):
        if run.terminal_state.grid != grid:
            raise ConfigError("runs and basis must share one grid")
    if run_plus.schedule != run_minus.schedule or run_plus.t3 != run_minus.t3:
        raise ConfigError("runs must share schedule and readout time")
    cols = []
    for run in (run_plus, run_minus):
        out = run.terminal_state
        cols.append([inner(basis.psi_plus, out), inner(basis.psi_minus, out)])
    matrix = np.array(cols, dtype=complex).T
    leakage = tuple(float(1.0 - np.linalg.norm(matrix[:, j]) ** 2) for j in range(2))
    reliable = max(leakage) <= RECONSTRUCTION_LEAKAGE_LIMIT
    return ReconstructedGate(matrix=matrix, leakage=leakage, reliable=reliable)
