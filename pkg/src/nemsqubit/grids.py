"""Uniform 1D position grids and discrete complex wavefunctions.

Everything is dimensionless: positions in units of the natural length,
times in units of the natural time, hbar = m = 1.  Wavefunctions live on
the grid nodes with Dirichlet boundaries (psi pinned to zero outside the
domain) and carry a discrete L2 norm sum(|psi_i|^2) * spacing == 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

MIN_POINTS = 16


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid of ``n_points`` nodes on [x_min, x_max], ends included."""

    x_min: float
    x_max: float
    n_points: int

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def symmetric(self) -> bool:
        return self.x_min == -self.x_max

    def points(self) -> np.ndarray:
        # x_i = x_min + i*spacing exactly, not linspace arithmetic
        return self.x_min + self.spacing * np.arange(self.n_points)

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max


def build_grid(x_min: float, x_max: float, n_points: int) -> SpatialGrid:
    """Validate and build a uniform grid.

    Raises
    ------
    ConfigError
        For non-finite bounds, x_max <= x_min, or fewer than 16 nodes.
    """
    if not (math.isfinite(x_min) and math.isfinite(x_max)):
        raise ConfigError(f"grid bounds must be finite, got [{x_min}, {x_max}]")
    if x_max <= x_min:
        raise ConfigError(f"grid needs x_max > x_min, got [{x_min}, {x_max}]")
    if int(n_points) != n_points or n_points < MIN_POINTS:
        raise ConfigError(f"grid needs at least {MIN_POINTS} nodes, got {n_points}")
    return SpatialGrid(float(x_min), float(x_max), int(n_points))


@dataclass
class WavefunctionState:
    """Complex amplitudes on a grid at a given time."""

    grid: SpatialGrid
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.grid.n_points,):
            raise ConfigError(
                f"amplitude count {self.amplitudes.shape} does not match grid "
                f"({self.grid.n_points} nodes)"
            )

    def norm(self) -> float:
        """Discrete L2 norm: sqrt(sum |psi_i|^2 * spacing)."""
        return math.sqrt(np.sum(np.abs(self.amplitudes) ** 2).real * self.grid.spacing)

    def normalized(self) -> "WavefunctionState":
        n = self.norm()
        if n == 0.0:
            raise ConfigError("cannot normalize a zero wavefunction")
        return WavefunctionState(self.grid, self.amplitudes / n, self.time)

    def boundary_amplitude(self) -> float:
        """max(|psi| at the two domain edges); a domain-adequacy check."""
        return float(max(abs(self.amplitudes[0]), abs(self.amplitudes[-1])))

    def copy(self) -> "WavefunctionState":
        return WavefunctionState(self.grid, self.amplitudes.copy(), self.time)


def inner(bra: WavefunctionState, ket: WavefunctionState) -> complex:
    """Discrete inner product <bra|ket> = sum conj(bra_i) ket_i * spacing."""
    if bra.grid != ket.grid:
        raise ConfigError("inner product requires a shared grid")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes) * bra.grid.spacing)


def mirror(state: WavefunctionState) -> WavefunctionState:
    """Spatial mirror x -> -x; exact on symmetric grids."""
    if not state.grid.symmetric:
        raise ConfigError("mirror requires a symmetric grid (x_min = -x_max)")
    return WavefunctionState(state.grid, state.amplitudes[::-1].copy(), state.time)


def _cubic_weights(xs: np.ndarray, x: float) -> np.ndarray:
    """Lagrange weights of the four stencil nodes ``xs`` at probe ``x``."""
    w = np.empty(4)
    for i in range(4):
        p = 1.0
        for j in range(4):
            if j != i:
                p *= (x - xs[j]) / (xs[i] - xs[j])
        w[i] = p
    return w


def probe_amplitude(state: WavefunctionState, x_probe: float) -> complex:
    """Complex amplitude at ``x_probe`` by cubic interpolation of the real
    and imaginary parts on the four nearest nodes."""
    grid = state.grid
    if not grid.contains(x_probe):
        raise DomainError(
            f"probe {x_probe} outside domain [{grid.x_min}, {grid.x_max}]"
        )
    h = grid.spacing
    j = int(math.floor((x_probe - grid.x_min) / h))
    i0 = min(max(j - 1, 0), grid.n_points - 4)
    xs = grid.x_min + h * (i0 + np.arange(4))
    w = _cubic_weights(xs, x_probe)
    seg = state.amplitudes[i0 : i0 + 4]
    return complex(np.dot(w, seg.real) + 1j * np.dot(w, seg.imag))


def observe(state: WavefunctionState, x_probe: float) -> tuple[float, float]:
    """(magnitude, phase) of psi at ``x_probe``; phase is principal value
    mapped to [0, 2*pi)."""
    amp = probe_amplitude(state, x_probe)
    phase = math.atan2(amp.imag, amp.real) % (2.0 * math.pi)
    return abs(amp), phase
