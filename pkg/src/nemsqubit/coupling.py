"""Capacitive coupling between two buckled plates.

Two plates at lateral positions x1, x2 a distance X_cap apart form a
parallel-plate capacitor C = eps0*S / (X_cap + x1 - x2); holding a voltage
V1 across it adds C V1^2 / 2 to the pair of double wells.  The four well
corners (+-a, +-a) then split into three energies E+ < U0 < E-, and the
first-order splitting scale EX = a eps0 S V1^2 / X_cap^2 drives the
two-qubit phase gate.  Everything here is dimensionless, following the
convention that X_cap and a are measured in natural lengths and
eps0*S*V1^2/2 is a dimensionless energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .doublewell import HarmonicApprox, gaussian_state, potential_value
from .errors import ConfigError, DomainError
from .grids import SpatialGrid, _cubic_weights, build_grid

LANDSCAPE_MAX_NODES = 512 * 512
VERIFY_MAX_POINTS = 256
VERIFY_MAX_TIME = 5.0


@dataclass(frozen=True)
class CouplingParams:
    """eps0S = permittivity x plate area, X_cap = plate separation,
    V1 = applied voltage, a = well displacement (lengths share one unit)."""

    eps0S: float
    X_cap: float
    V1: float
    a: float

    def __post_init__(self):
        for name in ("eps0S", "X_cap", "V1", "a"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.X_cap <= 2.0 * self.a:
            raise ConfigError(
                f"plate separation X_cap = {self.X_cap} must exceed 2a = {2 * self.a}"
            )

    @property
    def energy_scale(self) -> float:
        """eps0S V1^2 / 2, the coupling energy at unit gap."""
        return 0.5 * self.eps0S * self.V1**2


def pair_potential(p: CouplingParams, dw_pair, x1, x2):
    """V(x1, x2) = V_DW(x1) + V_DW(x2) + eps0S V1^2 / (2 (X_cap + x1 - x2)).

    Vectorized over broadcastable x1, x2; raises DomainError if the gap
    X_cap + x1 - x2 vanishes or goes negative anywhere.
    """
    dw1, dw2 = dw_pair
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    gap = p.X_cap + x1 - x2
    if np.any(gap <= 0):
        raise DomainError("capacitor gap X_cap + x1 - x2 vanished; plates touch")
    v = potential_value(dw1, x1) + potential_value(dw2, x2) + p.energy_scale / gap
    return v if np.asarray(v).shape else float(v)


@dataclass(frozen=True)
class CornerEnergies:
    """Electrostatic energies of the four corner configurations.

    U0 at (+-a, +-a) aligned, E_plus at (a, -a), E_minus at (-a, a);
    EX is the first-order coupling scale.  first_order_rel_error is
    |EX - |E - U0|| / |E - U0|, identical for both branches and equal to
    2a/X_cap exactly.
    """

    U0: float
    E_plus: float
    E_minus: float
    EX: float
    first_order_rel_error: float


def corner_energies(p: CouplingParams) -> CornerEnergies:
    c = p.energy_scale
    u0 = c / p.X_cap
    e_plus = c / (p.X_cap + 2.0 * p.a)
    e_minus = c / (p.X_cap - 2.0 * p.a)
    ex = p.a * p.eps0S * p.V1**2 / p.X_cap**2
    rel = abs(ex - (u0 - e_plus)) / (u0 - e_plus)
    return CornerEnergies(U0=u0, E_plus=e_plus, E_minus=e_minus, EX=ex, first_order_rel_error=rel)


def ising_gate_time(EX: float) -> float:
    """Duration at which the two-qubit phase gate equals the Ising gate:
    t = pi / EX (hbar = 1)."""
    if EX <= 0:
        raise ConfigError(f"coupling scale EX must be positive, got {EX}")
    return math.pi / EX


@dataclass(frozen=True)
class LandscapeMinimum:
    x1: float
    x2: float
    energy: float
    grid_x1: float
    grid_x2: float
    grid_energy: float


@dataclass
class Landscape2D:
    grid1: SpatialGrid
    grid2: SpatialGrid
    values: np.ndarray
    minima: list[LandscapeMinimum] = field(default_factory=list)


def _refine_minimum(p: CouplingParams, dw_pair, x1: float, x2: float):
    """Newton refinement of a landscape minimum with analytic derivatives."""
    dw1, dw2 = dw_pair
    c = p.energy_scale
    for _ in range(40):
        gap = p.X_cap + x1 - x2
        g1 = 4.0 * x1 * (x1 * x1 - dw1.A**2) + dw1.F - c / gap**2
        g2 = 4.0 * x2 * (x2 * x2 - dw2.A**2) + dw2.F + c / gap**2
        h11 = 12.0 * x1 * x1 - 4.0 * dw1.A**2 + 2.0 * c / gap**3
        h22 = 12.0 * x2 * x2 - 4.0 * dw2.A**2 + 2.0 * c / gap**3
        h12 = -2.0 * c / gap**3
        det = h11 * h22 - h12 * h12
        if det == 0.0:
            break
        dx1 = (h22 * g1 - h12 * g2) / det
        dx2 = (h11 * g2 - h12 * g1) / det
        x1 -= dx1
        x2 -= dx2
        if max(abs(dx1), abs(dx2)) < 1e-13:
            break
    return x1, x2, float(pair_potential(p, dw_pair, x1, x2))


def landscape_2d(
    p: CouplingParams, dw_pair, grid1: SpatialGrid, grid2: SpatialGrid
) -> Landscape2D:
    """Sample the pair potential on the product grid and locate its minima.

    Grid minima (strict 8-neighborhood) are refined by Newton iteration on
    the analytic gradient, since the plain argmin is too coarse to compare
    against the corner energies.
    """
    if grid1.n_points * grid2.n_points > LANDSCAPE_MAX_NODES:
        raise ConfigError(
            f"landscape limited to {LANDSCAPE_MAX_NODES} nodes, "
            f"got {grid1.n_points} x {grid2.n_points}"
        )
    x1 = grid1.points()[:, None]
    x2 = grid2.points()[None, :]
    values = pair_potential(p, dw_pair, x1, x2)

    inner_v = values[1:-1, 1:-1]
    neighbors = [
        values[1 + di : values.shape[0] - 1 + di, 1 + dj : values.shape[1] - 1 + dj]
        for di in (-1, 0, 1)
        for dj in (-1, 0, 1)
        if (di, dj) != (0, 0)
    ]
    is_min = np.all([inner_v < nb for nb in neighbors], axis=0)
    minima = []
    for i, j in zip(*np.nonzero(is_min)):
        gx1 = float(grid1.points()[i + 1])
        gx2 = float(grid2.points()[j + 1])
        rx1, rx2, energy = _refine_minimum(p, dw_pair, gx1, gx2)
        minima.append(
            LandscapeMinimum(
                x1=rx1,
                x2=rx2,
                energy=energy,
                grid_x1=gx1,
                grid_x2=gx2,
                grid_energy=float(inner_v[i, j]),
            )
        )
    minima.sort(key=lambda m: m.energy)
    return Landscape2D(grid1, grid2, values, minima)


@dataclass
class BranchRecord:
    label: str
    center: tuple[float, float]
    model_energy: float
    phase_measured: float  # accumulated phase at t relative to the ++ branch
    phase_model: float
    magnitude_change: float  # max relative change of |Psi| at the branch center


@dataclass
class PhaseModelReport:
    """Comparison of full 2D propagation against the diagonal phase model.

    phase_error_max is the largest |measured - model| relative branch
    phase; phase_error_rel normalizes it by the largest model phase.
    The run assumes an ideal constant-voltage window of duration t (no
    switching transients are modeled).
    """

    t: float
    dt: float
    n_points: int
    branches: list[BranchRecord]
    phase_error_max: float
    phase_error_rel: float
    magnitude_change_max: float
    norm_drift: float
    assumptions: str = "constant V1 over the whole window; switching not modeled"

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "dt": self.dt,
            "n_points": self.n_points,
            "phase_error_max": self.phase_error_max,
            "phase_error_rel": self.phase_error_rel,
            "magnitude_change_max": self.magnitude_change_max,
            "norm_drift": self.norm_drift,
            "assumptions": self.assumptions,
            "branches": [
                {
                    "label": b.label,
                    "center": list(b.center),
                    "model_energy": b.model_energy,
                    "phase_measured": b.phase_measured,
                    "phase_model": b.phase_model,
                    "magnitude_change": b.magnitude_change,
                }
                for b in self.branches
            ],
        }


def _kinetic_propagator(grid: SpatialGrid, dt: float) -> np.ndarray:
    """Exact exp(-i K dt) for the 1D kinetic tridiagonal, via its full
    eigendecomposition.  The residual non-orthogonality of the LAPACK
    eigenvector matrix would otherwise leak norm systematically every
    step, so the polar factor is extracted by one Newton-Schulz sweep,
    leaving the propagator unitary to machine precision."""
    h = grid.spacing
    n = grid.n_points
    diag = np.full(n, 1.0 / h**2)
    off = np.full(n - 1, -0.5 / h**2)
    lam, vec = eigh_tridiagonal(diag, off)
    prop = (vec * np.exp(-1j * lam * dt)) @ vec.T
    for _ in range(2):
        prop = 0.5 * prop @ (3.0 * np.eye(n) - prop.conj().T @ prop)
    return prop


def _probe_2d(grid: SpatialGrid, psi: np.ndarray, x1: float, x2: float) -> complex:
    """Bicubic probe: cubic interpolation along both axes on a 4x4 patch."""
    h = grid.spacing
    idx = []
    weights = []
    for x in (x1, x2):
        if not grid.contains(x):
            raise DomainError(f"probe {x} outside domain [{grid.x_min}, {grid.x_max}]")
        j = int(math.floor((x - grid.x_min) / h))
        i0 = min(max(j - 1, 0), grid.n_points - 4)
        xs = grid.x_min + h * (i0 + np.arange(4))
        idx.append(i0)
        weights.append(_cubic_weights(xs, x))
    patch = psi[idx[0] : idx[0] + 4, idx[1] : idx[1] + 4]
    return complex(weights[0] @ patch @ weights[1])


def verify_phase_model_2d(
    p: CouplingParams,
    dw_pair,
    t: float,
    n_points: int = 256,
    dt: float = 1e-3,
    x_half: float | None = None,
) -> PhaseModelReport:
    """Propagate the four product Gaussians under the full 2D potential and
    compare their accumulated relative phases with the diagonal model
    exp(-i E_branch t) built from the exact corner energies.

    Propagation is Strang splitting: half-step potential phase, exact
    kinetic step per axis, half-step potential phase.  Kept deliberately
    small (n <= 256, t <= 5) for desk-scale cost; larger requests are
    refused with suggested parameters.
    """
    if n_points > VERIFY_MAX_POINTS or t > VERIFY_MAX_TIME:
        raise ConfigError(
            f"2D verification capped at n = {VERIFY_MAX_POINTS}, t = {VERIFY_MAX_TIME}; "
            f"requested n = {n_points}, t = {t}; rerun with n_points <= 256 and t <= 5"
        )
    dw1, dw2 = dw_pair
    if dw1.A != dw2.A or dw1.A != p.a:
        raise ConfigError("2D verification expects matching well separations A = a")
    ha = HarmonicApprox.for_params(dw1)
    if x_half is None:
        x_half = dw1.A + 6.5 * ha.width_sigma
    if 2.0 * x_half >= p.X_cap:
        raise ConfigError(
            f"domain half-width {x_half} needs X_cap > {2 * x_half} to keep the "
            "capacitor gap positive; increase X_cap or shrink the domain"
        )
    grid = build_grid(-x_half, x_half, n_points)
    h = grid.spacing
    x1 = grid.points()[:, None]
    x2 = grid.points()[None, :]
    v = pair_potential(p, dw_pair, x1, x2)

    n_steps = max(1, math.ceil(t / dt - 1e-12))
    dt_eff = t / n_steps
    phase_half = np.exp(-0.5j * v * dt_eff)
    kin = _kinetic_propagator(grid, dt_eff)

    corners = corner_energies(p)
    branch_defs = [
        ("++", ("plus", "plus"), corners.U0),
        ("+-", ("plus", "minus"), corners.E_plus),
        ("-+", ("minus", "plus"), corners.E_minus),
        ("--", ("minus", "minus"), corners.U0),
    ]
    # Sample often enough that the overlap phase moves well under pi between
    # samples, so the accumulated phase unwraps unambiguously.
    sample_every = max(1, round(0.1 / dt_eff))

    accumulated = []
    mag_changes = []
    drifts = []
    centers = []
    for _, (s1, s2), _ in branch_defs:
        psi1 = gaussian_state(dw1, s1, grid).amplitudes
        psi2 = gaussian_state(dw2, s2, grid).amplitudes
        psi = np.outer(psi1, psi2)
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2).real * h * h)
        psi0c = psi.conj().copy()
        c1 = dw1.A if s1 == "plus" else -dw1.A
        c2 = dw2.A if s2 == "plus" else -dw2.A
        centers.append((c1, c2))
        mag0 = abs(_probe_2d(grid, psi, c1, c2))
        norm0 = np.sum(np.abs(psi) ** 2).real * h * h
        overlaps = [np.sum(psi0c * psi) * h * h]
        mag_dev = 0.0
        for step in range(n_steps):
            psi *= phase_half
            psi = kin @ psi
            psi = psi @ kin  # kin is symmetric; right product applies axis 2
            psi *= phase_half
            if (step + 1) % sample_every == 0 or step == n_steps - 1:
                overlaps.append(np.sum(psi0c * psi) * h * h)
                mag_dev = max(
                    mag_dev, abs(abs(_probe_2d(grid, psi, c1, c2)) - mag0) / mag0
                )
        drifts.append(abs(np.sum(np.abs(psi) ** 2).real * h * h - norm0))
        accumulated.append(float(np.unwrap(np.angle(overlaps))[-1]))
        mag_changes.append(mag_dev)

    branches = []
    err_max = 0.0
    model_max = 0.0
    for i, (label, _, energy) in enumerate(branch_defs):
        measured = accumulated[i] - accumulated[0]
        model = -(energy - corners.U0) * t
        err_max = max(err_max, abs(measured - model))
        model_max = max(model_max, abs(model))
        branches.append(
            BranchRecord(
                label=label,
                center=centers[i],
                model_energy=energy,
                phase_measured=float(measured),
                phase_model=float(model),
                magnitude_change=float(mag_changes[i]),
            )
        )
    return PhaseModelReport(
        t=t,
        dt=dt_eff,
        n_points=n_points,
        branches=branches,
        phase_error_max=float(err_max),
        phase_error_rel=float(err_max / model_max) if model_max > 0 else 0.0,
        magnitude_change_max=float(max(mag_changes)),
        norm_drift=float(max(drifts)),
    )
