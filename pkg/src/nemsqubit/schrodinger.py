"""Discretized 1D Schrodinger operators: eigensolve and time propagation.

The Hamiltonian H = -1/2 d^2/dX^2 + V(X) is discretized with second-order
central differences and Dirichlet boundaries, giving a real symmetric
tridiagonal operator

    diagonal[i]     = 1/h^2 + V(x_i)
    off_diagonal[i] = -1/(2 h^2)

Time stepping uses Crank-Nicolson (the Cayley form of the implicit
midpoint rule) with the potential evaluated at the half step.  Each step
costs one tridiagonal solve, so a full gate protocol is O(n_steps * n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError, ConvergenceError, DomainError, StabilityError
from .grids import SpatialGrid, WavefunctionState, probe_amplitude

DEFAULT_DT = 5e-4
DEFAULT_NPOINTS = 2049
EIGEN_RESIDUAL_TOL = 1e-8
NORM_DRIFT_LIMIT = 1e-8


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix; only diagonal and one off-diagonal stored."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        if len(self.off_diagonal) != len(self.diagonal) - 1:
            raise ConfigError("off_diagonal must have length n - 1")

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out


def discretize_hamiltonian(
    grid: SpatialGrid, potential: Callable[[np.ndarray], np.ndarray]
) -> TridiagonalOperator:
    """Build the tridiagonal Hamiltonian for a static potential.

    ``potential`` is evaluated vectorized on the grid nodes and must be
    finite everywhere; the offending node is reported otherwise.
    """
    x = grid.points()
    v = np.asarray(potential(x), dtype=float)
    if v.shape != x.shape:
        v = np.broadcast_to(v, x.shape).astype(float)
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"potential is not finite at node {i} (x = {x[i]})")
    h = grid.spacing
    diag = 1.0 / h**2 + v
    off = np.full(grid.n_points - 1, -0.5 / h**2)
    return TridiagonalOperator(diag, off, h)


@dataclass
class EigenResult:
    """Lowest eigenpairs of a tridiagonal operator.

    ``eigenvectors[i]`` is the i-th eigenfunction, normalized to unit
    discrete L2 norm (sum v^2 * spacing = 1).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray

    @property
    def k(self) -> int:
        return len(self.eigenvalues)


def eigensolve(op: TridiagonalOperator, k: int) -> EigenResult:
    """k lowest eigenpairs by LAPACK bisection + inverse iteration.

    The residual bound ||H v - E v|| / ||v|| < 1e-8 is enforced on every
    returned pair; a ConvergenceError is raised if the backend fails or
    the bound is not met.
    """
    n = op.size
    if not 1 <= k <= n // 4:
        raise ConfigError(f"k must satisfy 1 <= k <= n/4 = {n // 4}, got {k}")
    try:
        vals, vecs = eigh_tridiagonal(
            op.diagonal, op.off_diagonal, select="i", select_range=(0, k - 1)
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    residuals = np.empty(k)
    for i in range(k):
        v = vecs[:, i]
        r = op.matvec(v) - vals[i] * v
        residuals[i] = np.linalg.norm(r) / np.linalg.norm(v)
    if residuals.max() > EIGEN_RESIDUAL_TOL:
        raise ConvergenceError(
            f"eigenpair residual {residuals.max():.3e} exceeds {EIGEN_RESIDUAL_TOL}"
        )
    # LAPACK returns unit l2 columns; rescale to unit discrete L2 grid functions.
    vectors = (vecs / math.sqrt(op.spacing)).T.copy()
    return EigenResult(vals, vectors, residuals)


@njit(cache=True)
def _cn_step(diag_half, off, psi, dt, rhs, cwork):
    """One Crank-Nicolson step: (1 + i dt/2 H) psi' = (1 - i dt/2 H) psi.

    ``diag_half`` holds kinetic + potential at the half step; ``off`` is the
    constant off-diagonal.  Thomas solve without pivoting; the identity
    contribution keeps the system diagonally dominant for V bounded below.
    """
    n = psi.shape[0]
    c = 0.5j * dt
    coff = c * off
    rhs[0] = psi[0] - c * diag_half[0] * psi[0] - coff * psi[1]
    for i in range(1, n - 1):
        rhs[i] = psi[i] - c * diag_half[i] * psi[i] - coff * (psi[i - 1] + psi[i + 1])
    rhs[n - 1] = psi[n - 1] - c * diag_half[n - 1] * psi[n - 1] - coff * psi[n - 2]
    b0 = 1.0 + c * diag_half[0]
    cwork[0] = coff / b0
    rhs[0] = rhs[0] / b0
    for i in range(1, n):
        m = 1.0 + c * diag_half[i] - coff * cwork[i - 1]
        if i < n - 1:
            cwork[i] = coff / m
        rhs[i] = (rhs[i] - coff * rhs[i - 1]) / m
    psi[n - 1] = rhs[n - 1]
    for i in range(n - 2, -1, -1):
        psi[i] = rhs[i] - cwork[i] * psi[i + 1]


@dataclass
class PropagationResult:
    """Terminal state plus optional trajectory samples."""

    state: WavefunctionState
    norm_drift: float
    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    probe_values: np.ndarray = field(default_factory=lambda: np.empty((0, 0), complex))
    states: list = field(default_factory=list)


def propagate(
    state: WavefunctionState,
    potential_at_time: Callable[[np.ndarray, float], np.ndarray],
    t_end: float,
    dt: float = DEFAULT_DT,
    sample_stride: int | None = None,
    probes: Sequence[float] = (),
    keep_states: bool = False,
) -> PropagationResult:
    """Advance ``state`` to ``t_end`` under a time-dependent potential.

    The step count is chosen so an integer number of steps lands exactly on
    ``t_end`` with effective step <= dt.  When ``sample_stride`` is given,
    probe amplitudes (and optionally full state snapshots) are recorded
    every that many steps, plus the final step.

    Raises StabilityError if the norm drifts by more than 1e-8 over the run.
    """
    if t_end <= state.time:
        raise ConfigError(f"t_end = {t_end} must exceed state time {state.time}")
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    grid = state.grid
    x = grid.points()
    h = grid.spacing
    span = t_end - state.time
    n_steps = max(1, math.ceil(span / dt - 1e-12))
    dt_eff = span / n_steps
    kin = 1.0 / h**2
    off = -0.5 / h**2

    psi = state.amplitudes.astype(np.complex128).copy()
    rhs = np.empty_like(psi)
    cwork = np.empty_like(psi)
    norm0 = np.sum(np.abs(psi) ** 2) * h

    probes = list(probes)
    sample_times: list[float] = []
    sample_vals: list[list[complex]] = []
    snapshots: list[WavefunctionState] = []

    def take_sample(t_now: float) -> None:
        st = WavefunctionState(grid, psi, t_now)
        sample_times.append(t_now)
        if probes:
            sample_vals.append([probe_amplitude(st, p) for p in probes])
        if keep_states:
            snapshots.append(st.copy())

    t0 = state.time
    if sample_stride is not None:
        take_sample(t0)
    for step in range(n_steps):
        t_half = t0 + (step + 0.5) * dt_eff
        v = np.asarray(potential_at_time(x, t_half), dtype=float)
        bad = not np.all(np.isfinite(v))
        if bad:
            i = int(np.flatnonzero(~np.isfinite(v))[0])
            raise DomainError(
                f"potential not finite at node {i} (x = {x[i]}, t = {t_half})"
            )
        _cn_step(kin + v, off, psi, dt_eff, rhs, cwork)
        if sample_stride is not None and (
            (step + 1) % sample_stride == 0 or step == n_steps - 1
        ):
            take_sample(t0 + (step + 1) * dt_eff)

    norm1 = np.sum(np.abs(psi) ** 2) * h
    drift = abs(norm1 - norm0)
    if drift > NORM_DRIFT_LIMIT:
        raise StabilityError(
            f"norm drifted by {drift:.3e} (> {NORM_DRIFT_LIMIT}); reduce dt"
        )
    final = WavefunctionState(grid, psi, t_end)
    return PropagationResult(
        state=final,
        norm_drift=drift,
        times=np.asarray(sample_times),
        probe_values=np.asarray(sample_vals, dtype=complex)
        if sample_vals
        else np.empty((0, len(probes)), complex),
        states=snapshots,
    )
