"""Stationary analysis of the quartic double well V(X) = (X^2 - A^2)^2 + F*X.

A is the well separation and F a linear field bias, both dimensionless
(the field unit used in reports is E_u = hbar*omega/a0 = 2*sqrt(2), a
pure number in this convention).  Harmonic facts about the wells:

    omega = 2*A*sqrt(2),  E0 ~ omega/2,  sigma = omega**-0.5,

valid in the vicinity of X = +-A for A >~ 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConfigError, NemsqubitError
from .grids import SpatialGrid, WavefunctionState, build_grid
from .schrodinger import DEFAULT_NPOINTS, discretize_hamiltonian, eigensolve

# hbar*omega/a0 expressed dimensionless: omega/A = 2*sqrt(2) for every A > 0.
FIELD_UNIT = 2.0 * math.sqrt(2.0)

# Relative floor below which an eigenvalue difference is solver noise.
SPLITTING_FLOOR_REL = 1e-9


class ValidityWarning(UserWarning):
    """Parameters left the regime where an approximation is stated valid."""


@dataclass(frozen=True)
class DoubleWellParams:
    """Well separation A >= 0 and dimensionless field bias F (default 0)."""

    A: float
    F: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.A) or self.A < 0:
            raise ConfigError(f"well separation A must be finite and >= 0, got {self.A}")
        if not math.isfinite(self.F):
            raise ConfigError(f"field bias F must be finite, got {self.F}")


def potential_value(params: DoubleWellParams, x):
    """(x^2 - A^2)^2 + F*x, vectorized over x."""
    x = np.asarray(x, dtype=float)
    v = (x * x - params.A**2) ** 2 + params.F * x
    return v if v.shape else float(v)


@dataclass(frozen=True)
class HarmonicApprox:
    """Harmonic expansion of the well bottoms at X = +-A."""

    omega: float
    ground_energy: float
    width_sigma: float
    centers: tuple[float, float]

    @classmethod
    def for_params(cls, params: DoubleWellParams) -> "HarmonicApprox":
        if params.A <= 0:
            raise ConfigError("harmonic approximation requires A > 0")
        omega = 2.0 * params.A * math.sqrt(2.0)
        return cls(
            omega=omega,
            ground_energy=omega / 2.0,
            width_sigma=omega**-0.5,
            centers=(params.A, -params.A),
        )


def default_grid(params: DoubleWellParams, n_points: int = DEFAULT_NPOINTS) -> SpatialGrid:
    """Symmetric domain [-(A + 6 sigma), +(A + 6 sigma)], never narrower than
    [-8, 8]; keeps boundary amplitudes of well states below 1e-6."""
    half = 8.0
    if params.A > 0:
        sigma = HarmonicApprox.for_params(params).width_sigma
        half = max(half, params.A + 6.0 * sigma)
    return build_grid(-half, half, n_points)


def gaussian_state(
    params: DoubleWellParams, side: str, grid: SpatialGrid
) -> WavefunctionState:
    """Harmonic ground-state Gaussian centered at +A (side "plus") or -A
    ("minus"), renormalized on the grid.

    The closed form is stated valid for A >~ 2; below that a
    ValidityWarning is emitted but the state is still constructed.
    """
    if side not in ("plus", "minus"):
        raise ConfigError(f'side must be "plus" or "minus", got {side!r}')
    if params.A < 2.0:
        warnings.warn(
            f"Gaussian well state requested at A = {params.A} < 2, outside the "
            "stated validity range of the harmonic approximation",
            ValidityWarning,
            stacklevel=2,
        )
    ha = HarmonicApprox.for_params(params)
    center = ha.centers[0] if side == "plus" else ha.centers[1]
    x = grid.points()
    psi = (ha.omega / math.pi) ** 0.25 * np.exp(-0.5 * ha.omega * (x - center) ** 2)
    state = WavefunctionState(grid, psi.astype(np.complex128), 0.0)
    return state.normalized()


@dataclass
class ScanResult:
    """Spectrum scan table: one row per scanned value.

    ``energies`` holds the k lowest levels sorted ascending per row (NaN on
    solver failure); ``tracked`` reorders columns so each one follows a
    fixed physical level through crossings, by maximal eigenvector overlap
    with the previous row.
    """

    variable: str
    values: np.ndarray
    energies: np.ndarray
    tracked: np.ndarray
    flags: list[str] = field(default_factory=list)


def spectrum_scan(
    variable: str,
    values,
    fixed: DoubleWellParams,
    k: int = 6,
    n_points: int = DEFAULT_NPOINTS,
    grid: SpatialGrid | None = None,
) -> ScanResult:
    """Eigenvalue scan versus well separation or field bias.

    Solver failures annotate the row's flag and the scan continues.
    """
    if variable not in ("well_separation", "field"):
        raise ConfigError(f"unknown scan variable {variable!r}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ConfigError("scan needs at least one value")
    if np.any(np.diff(values) < 0):
        raise ConfigError("scan values must be sorted ascending")
    if grid is None:
        if variable == "well_separation":
            widest = DoubleWellParams(A=float(values.max()), F=fixed.F)
        else:
            widest = fixed
        grid = default_grid(widest, n_points)

    m = values.size
    energies = np.full((m, k), np.nan)
    tracked = np.full((m, k), np.nan)
    flags = [""] * m
    h = grid.spacing
    # prev_tracked[j] is the eigenfunction currently carried by tracked
    # column j; a new row's sorted columns are matched to it by overlap.
    prev_tracked = None
    for i, val in enumerate(values):
        if variable == "well_separation":
            params = DoubleWellParams(A=float(val), F=fixed.F)
        else:
            params = DoubleWellParams(A=fixed.A, F=float(val))
        try:
            op = discretize_hamiltonian(grid, lambda x: potential_value(params, x))
            res = eigensolve(op, k)
        except NemsqubitError as exc:
            flags[i] = f"solver failure: {exc}"
            prev_tracked = None
            continue
        energies[i] = res.eigenvalues
        if prev_tracked is None:
            assign = np.arange(k)
        else:
            overlap = np.abs(prev_tracked @ res.eigenvectors.T) * h
            rows, cols = linear_sum_assignment(-overlap)
            assign = np.empty(k, dtype=int)
            assign[rows] = cols
        tracked[i] = res.eigenvalues[assign]
        prev_tracked = res.eigenvectors[assign]
    return ScanResult(variable, values, energies, tracked, flags)


@dataclass(frozen=True)
class SplittingResult:
    """Tunneling splitting E1 - E0 with its decimal log and floor flag."""

    A: float
    delta: float
    log10_delta: float
    floor_limited: bool


def splitting(A: float, n_points: int = DEFAULT_NPOINTS) -> SplittingResult:
    """E1 - E0 of the double well at separation A.

    Splittings below 1e-9 relative to E0 cannot be distinguished from
    eigensolver noise in double precision and are flagged floor-limited
    (the physical value can be far smaller than the reported one).
    """
    params = DoubleWellParams(A=A)
    grid = default_grid(params, n_points)
    op = discretize_hamiltonian(grid, lambda x: potential_value(params, x))
    res = eigensolve(op, 2)
    delta = float(res.eigenvalues[1] - res.eigenvalues[0])
    floor = SPLITTING_FLOOR_REL * max(abs(float(res.eigenvalues[0])), 1.0)
    log10_delta = math.log10(delta) if delta > 0 else -math.inf
    return SplittingResult(A, delta, log10_delta, delta < floor)
