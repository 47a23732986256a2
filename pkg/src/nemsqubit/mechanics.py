"""Buckled-plate mechanics: mode shapes, elliptic arc length, Hooke
potential, quartic fit, natural units, and SI feasibility screening.

This is the only module that works in SI units.  A plate of natural half
length L0 is clamped at +-y0 (so the flat configuration has arc length
2*y0) with spring constant kappa.  The compressed plate bows out to a
lateral amplitude x0; its arc length L(x0) is a complete elliptic
integral, and the Hooke energy (kappa/2)(2L - 2L0)^2 is a double well in
x0 whenever L0 lies between the flat length and the maximal arc length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.constants import hbar as HBAR
from scipy.integrate import quad
from scipy.optimize import bisect

from .errors import ConfigError, ConvergenceError, GeometryError

ARC_QUAD_REL = 1e-12

# Feasibility bands read from typical NEMS material parameters.
LENGTH_BAND = (1e-6, 100e-6)  # element size (m)
DISPLACEMENT_BAND = (10e-15, 0.1e-12)  # quantum displacement scale (m)
MASS_BAND = (1e-21, 1e-14)  # effective mass (kg)
FREQUENCY_BAND = (1e6, 1e9)  # sqrt(kappa/m)/2pi (Hz)


@dataclass(frozen=True)
class PlateGeometry:
    """Half natural length L0 (m), half support distance y0 (m), spring
    constant kappa (N/m), and the boundary condition of the clamped ends."""

    L0: float
    y0: float
    kappa: float
    boundary: str = "fixed"

    def __post_init__(self):
        if not (0 < self.y0 < self.L0):
            raise ConfigError(
                f"plate needs 0 < y0 < L0, got y0 = {self.y0}, L0 = {self.L0}"
            )
        if self.kappa <= 0:
            raise ConfigError(f"spring constant must be positive, got {self.kappa}")
        if self.boundary not in ("fixed", "free"):
            raise ConfigError(f'boundary must be "fixed" or "free", got {self.boundary!r}')


def buckled_profile(geom: PlateGeometry, x0: float) -> Callable[[np.ndarray], np.ndarray]:
    """Deflection w(y) of the lowest buckling mode at amplitude x0.

    fixed ends: w = (x0/2)(1 + cos(pi y / y0)), w and w' vanish at +-y0.
    free ends:  w = x0 cos(pi y / (2 y0)),      w and w'' vanish at +-y0.
    """
    _check_amplitude(geom, x0)
    if geom.boundary == "fixed":
        return lambda y: 0.5 * x0 * (1.0 + np.cos(np.pi * np.asarray(y) / geom.y0))
    return lambda y: x0 * np.cos(np.pi * np.asarray(y) / (2.0 * geom.y0))


def _check_amplitude(geom: PlateGeometry, x0: float) -> None:
    if not abs(x0) < geom.y0:
        raise ConfigError(
            f"amplitude |x0| = {abs(x0)} must stay below the half span y0 = {geom.y0}"
        )


def arc_length(geom: PlateGeometry, x0: float) -> float:
    """Arc length L(x0) = (4 y0 / pi) * int_0^{pi/2} sqrt(1 + c^2 sin^2) dtheta
    with c = pi x0 / (2 y0); equals the complete elliptic integral of the
    second kind at imaginary modulus, evaluated here in its real form by
    adaptive quadrature to 1e-12 relative.
    """
    _check_amplitude(geom, x0)
    c2 = (math.pi * x0 / (2.0 * geom.y0)) ** 2
    val, err = quad(
        lambda th: math.sqrt(1.0 + c2 * math.sin(th) ** 2),
        0.0,
        math.pi / 2.0,
        epsabs=0.0,
        epsrel=ARC_QUAD_REL,
        limit=200,
    )
    if err > 1e-9 * abs(val):
        raise ConvergenceError(
            f"arc-length quadrature error estimate {err:.3e} too large at x0 = {x0}"
        )
    return 4.0 * geom.y0 / math.pi * val


def hooke_potential(geom: PlateGeometry, x0: float) -> float:
    """Elastic energy V(x0) = (kappa/2) (2 L(x0) - 2 L0)^2."""
    return 0.5 * geom.kappa * (2.0 * arc_length(geom, x0) - 2.0 * geom.L0) ** 2


@dataclass(frozen=True)
class QuarticFit:
    """Numerical quartic description lambda (x^2 - a^2)^2 + V0 of the Hooke
    landscape, alongside the closed-form values printed in the literature
    (reported for comparison only; see the discrepancy fields)."""

    lambda_fit: float
    a_fit: float
    V0: float
    barrier_height: float
    fit_residual: float  # max |fit - V| over the window, relative to barrier
    printed_lambda: float
    printed_a: float
    lambda_discrepancy: float  # |fit - printed| / |printed|
    a_discrepancy: float


def quartic_fit(geom: PlateGeometry, n_samples: int = 201) -> QuarticFit:
    """Fit the double-well form to the Hooke potential.

    The minimum position a solves L(a) = L0 (zero strain), found by
    bisection on (0, 0.99 y0); lambda and V0 then come from a linear least
    squares fit on |x0| <= 1.2 a.  Requires the buckling window
    2 y0 < L0 < L(0.99 y0); otherwise the flat or fully bowed plate never
    reaches its natural length and there is no double well.
    """
    g = lambda a: arc_length(geom, a) - geom.L0
    lo, hi = 0.0, 0.99 * geom.y0
    if g(lo) >= 0.0 or g(hi) <= 0.0:
        raise GeometryError(
            "plate not compressed enough: no buckled minimum with "
            f"L0 = {geom.L0} for flat length {2 * geom.y0} "
            f"(natural length must lie in ({2 * geom.y0}, {arc_length(geom, hi) :.6g}))"
        )
    a_fit = bisect(g, lo, hi, xtol=1e-15 * geom.y0, rtol=8.881784197001252e-16)
    resid = abs(arc_length(geom, a_fit) - geom.L0) / geom.L0
    if resid > 1e-10:
        raise ConvergenceError(
            f"arc-length minimum condition met only to {resid:.3e} relative"
        )

    window = min(1.2 * a_fit, 0.995 * geom.y0)
    xs = np.linspace(-window, window, n_samples)
    v = np.array([hooke_potential(geom, x) for x in xs])
    basis = np.column_stack([(xs**2 - a_fit**2) ** 2, np.ones_like(xs)])
    coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
    lambda_fit, v0 = float(coef[0]), float(coef[1])
    if lambda_fit <= 0:
        raise GeometryError("quartic fit produced a non-positive stiffness")

    barrier = hooke_potential(geom, 0.0) - hooke_potential(geom, a_fit)
    fit_vals = basis @ coef
    fit_residual = float(np.max(np.abs(fit_vals - v)) / barrier)

    printed_lambda = (geom.L0 - 3.0 * geom.y0) * geom.kappa * math.pi**4 / (
        256.0 * geom.y0**3
    )
    printed_a = (
        geom.y0
        * (4.0 * math.sqrt(2.0) / math.pi)
        * math.sqrt((geom.L0 - geom.y0) / (3.0 * geom.L0 - geom.y0))
    )
    return QuarticFit(
        lambda_fit=lambda_fit,
        a_fit=float(a_fit),
        V0=v0,
        barrier_height=float(barrier),
        fit_residual=fit_residual,
        printed_lambda=printed_lambda,
        printed_a=printed_a,
        lambda_discrepancy=abs(lambda_fit - printed_lambda) / abs(printed_lambda)
        if printed_lambda != 0
        else math.inf,
        a_discrepancy=abs(a_fit - printed_a) / abs(printed_a)
        if printed_a != 0
        else math.inf,
    )


@dataclass(frozen=True)
class NaturalUnits:
    """Natural time and length of the quartic oscillator in SI."""

    t_u: float
    x_u: float
    mass: float
    lambda_SI: float
    omega_SI: float | None = None


def natural_units(mass: float, lambda_SI: float, a: float | None = None) -> NaturalUnits:
    """t_u = (m^2 / (hbar lambda))^(1/3), x_u = hbar^(1/3) / (m lambda)^(1/6);
    with the well position a (m) supplied, also omega = 2 a sqrt(2 lambda / m)."""
    if mass <= 0 or lambda_SI <= 0:
        raise ConfigError("mass and quartic stiffness must both be positive")
    t_u = (mass**2 / (HBAR * lambda_SI)) ** (1.0 / 3.0)
    x_u = HBAR ** (1.0 / 3.0) / (mass * lambda_SI) ** (1.0 / 6.0)
    omega = 2.0 * a * math.sqrt(2.0 * lambda_SI / mass) if a is not None else None
    return NaturalUnits(t_u=t_u, x_u=x_u, mass=mass, lambda_SI=lambda_SI, omega_SI=omega)


def material_from_units(t_u: float, x_u: float) -> tuple[float, float]:
    """Invert natural_units: (mass, lambda) reproducing the given scales."""
    if t_u <= 0 or x_u <= 0:
        raise ConfigError("natural units must be positive")
    mass = HBAR * t_u / x_u**2
    lam = HBAR**2 / (mass * x_u**6)
    return mass, lam


@dataclass(frozen=True)
class FeasibilityRow:
    mass: float
    length: float
    kappa: float
    x_u: float
    t_u: float
    frequency: float
    flags: dict[str, bool]
    candidate: bool


def feasibility_report(
    mass_range: tuple[float, float],
    length_range: tuple[float, float],
    kappa_range: tuple[float, float],
    samples: int = 3,
) -> list[FeasibilityRow]:
    """Screen material parameters against the feasibility bands.

    For each sampled (mass, length, kappa): the characteristic frequency is
    sqrt(kappa/m), and the quartic stiffness is chosen so that the qubit
    well at separation 3 x_u oscillates at that same frequency, which fixes
    lambda = m^2 omega^3 / (hbar (6 sqrt(2))^3) and hence x_u and t_u.
    Rows passing every band are marked candidates.
    """
    for name, rng in (("mass", mass_range), ("length", length_range), ("kappa", kappa_range)):
        if not (len(rng) == 2 and 0 < rng[0] <= rng[1]):
            raise ConfigError(f"{name} range must be (lo, hi) with 0 < lo <= hi")
    if samples < 1:
        raise ConfigError("samples must be >= 1")

    def axis(rng):
        return np.geomspace(rng[0], rng[1], samples) if samples > 1 else np.array([rng[0]])

    rows = []
    for m in axis(mass_range):
        for ell in axis(length_range):
            for kap in axis(kappa_range):
                omega = math.sqrt(kap / m)
                lam = m**2 * omega**3 / (HBAR * (6.0 * math.sqrt(2.0)) ** 3)
                units = natural_units(m, lam)
                freq = omega / (2.0 * math.pi)
                flags = {
                    "length": LENGTH_BAND[0] <= ell <= LENGTH_BAND[1],
                    "displacement": DISPLACEMENT_BAND[0] <= units.x_u <= DISPLACEMENT_BAND[1],
                    "mass": MASS_BAND[0] <= m <= MASS_BAND[1],
                    "frequency": FREQUENCY_BAND[0] <= freq <= FREQUENCY_BAND[1],
                }
                rows.append(
                    FeasibilityRow(
                        mass=float(m),
                        length=float(ell),
                        kappa=float(kap),
                        x_u=units.x_u,
                        t_u=units.t_u,
                        frequency=freq,
                        flags=flags,
                        candidate=all(flags.values()),
                    )
                )
    return rows
