import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import ellipe

import nemsqubit as nq
from nemsqubit.errors import ConfigError, GeometryError
from nemsqubit.mechanics import material_from_units

GEOM = nq.PlateGeometry(L0=1.0, y0=0.45, kappa=1.0)


def test_geometry_validation():
    with pytest.raises(ConfigError):
        nq.PlateGeometry(L0=1.0, y0=1.5, kappa=1.0)
    with pytest.raises(ConfigError):
        nq.PlateGeometry(L0=1.0, y0=0.4, kappa=-1.0)
    with pytest.raises(ConfigError):
        nq.PlateGeometry(L0=1.0, y0=0.4, kappa=1.0, boundary="clamped")


def test_fixed_profile_boundary_conditions():
    w = nq.buckled_profile(GEOM, 0.3)
    y0 = GEOM.y0
    assert w(0.0) == pytest.approx(0.3)
    assert w(y0) == pytest.approx(0.0, abs=1e-14)
    assert w(-y0) == pytest.approx(0.0, abs=1e-14)
    eps = 1e-7
    slope = (w(y0) - w(y0 - eps)) / eps
    assert abs(slope) < 1e-5  # w' vanishes at the clamp


def test_free_profile_boundary_conditions():
    geom = nq.PlateGeometry(L0=1.0, y0=0.45, kappa=1.0, boundary="free")
    w = nq.buckled_profile(geom, 0.3)
    y0 = geom.y0
    assert w(y0) == pytest.approx(0.0, abs=1e-14)
    eps = 1e-5
    curvature = (w(y0) - 2 * w(y0 - eps) + w(y0 - 2 * eps)) / eps**2
    assert abs(curvature) < 1e-3  # w'' vanishes at the free end


def test_unbuckled_profile_is_flat():
    w = nq.buckled_profile(GEOM, 0.0)
    ys = np.linspace(-GEOM.y0, GEOM.y0, 11)
    assert np.max(np.abs(w(ys))) == 0.0


def test_arc_length_flat_segment_exact():
    assert nq.arc_length(GEOM, 0.0) == pytest.approx(2 * GEOM.y0, rel=1e-14)


def test_arc_length_small_amplitude_series():
    # L = 2 y0 + pi^2 x0^2/(8 y0) - 3 pi^4 x0^4/(512 y0^3) + O(x0^6)
    y0 = GEOM.y0
    for x0 in (1e-3, 5e-3, 2e-2):
        series = (
            2 * y0
            + math.pi**2 * x0**2 / (8 * y0)
            - 3 * math.pi**4 * x0**4 / (512 * y0**3)
        )
        err = abs(nq.arc_length(GEOM, x0) - series)
        assert err < 10.0 * x0**6 / y0**5


def test_arc_length_matches_elliptic_special_function():
    # independent route: (4 y0/pi) E(-c^2) with scipy's ellipe
    for x0 in (0.1, 0.25, 0.4):
        c = math.pi * x0 / (2 * GEOM.y0)
        expected = 4 * GEOM.y0 / math.pi * ellipe(-(c**2))
        assert nq.arc_length(GEOM, x0) == pytest.approx(expected, rel=1e-12)


@given(x0=st.floats(-0.44, 0.44))
def test_arc_length_even(x0):
    assert nq.arc_length(GEOM, x0) == pytest.approx(nq.arc_length(GEOM, -x0), rel=1e-12)


def test_arc_length_monotone_and_bounded_below():
    xs = np.linspace(0, 0.44, 12)
    ls = [nq.arc_length(GEOM, x) for x in xs]
    assert np.all(np.diff(ls) > 0)
    assert min(ls) >= 2 * GEOM.y0 - 1e-14


def test_arc_length_amplitude_bound():
    with pytest.raises(ConfigError):
        nq.arc_length(GEOM, GEOM.y0)


def test_hooke_flat_value_and_evenness():
    v0 = nq.hooke_potential(GEOM, 0.0)
    assert v0 == pytest.approx(0.5 * GEOM.kappa * (4 * GEOM.y0 - 2 * GEOM.L0) ** 2)
    assert nq.hooke_potential(GEOM, 0.2) == pytest.approx(
        nq.hooke_potential(GEOM, -0.2), rel=1e-12
    )


def test_quartic_fit_minimum_condition_and_zero():
    fit = nq.quartic_fit(GEOM)
    assert abs(nq.arc_length(GEOM, fit.a_fit) - GEOM.L0) / GEOM.L0 < 1e-10
    assert fit.lambda_fit > 0
    # both minima sit at zero energy within a sliver of the barrier
    for sign in (+1, -1):
        assert nq.hooke_potential(GEOM, sign * fit.a_fit) < 1e-12 * fit.barrier_height


def test_quartic_fit_residual_small_for_shallow_buckling():
    geom = nq.PlateGeometry(L0=1.0, y0=0.499, kappa=1.0)
    fit = nq.quartic_fit(geom)
    assert fit.fit_residual < 1e-3


def test_quartic_fit_amplitude_vanishes_at_threshold():
    a_fits = [
        nq.quartic_fit(nq.PlateGeometry(L0=1.0, y0=y0, kappa=1.0)).a_fit
        for y0 in (0.49, 0.495, 0.499)
    ]
    assert a_fits[0] > a_fits[1] > a_fits[2]
    assert a_fits[2] < 0.03


def test_quartic_fit_requires_buckling_window():
    # flat arc already longer than the natural length
    with pytest.raises(GeometryError, match="not compressed"):
        nq.quartic_fit(nq.PlateGeometry(L0=1.0, y0=0.9, kappa=1.0))
    # natural length beyond the maximal bowed arc
    with pytest.raises(GeometryError, match="not compressed"):
        nq.quartic_fit(nq.PlateGeometry(L0=1.0, y0=0.3, kappa=1.0))


def test_quartic_fit_reports_printed_discrepancy():
    fit = nq.quartic_fit(GEOM)
    # the closed-form values are reported, not asserted: the printed quartic
    # coefficient is negative here while the fitted one is positive
    assert fit.printed_lambda < 0 < fit.lambda_fit
    assert fit.lambda_discrepancy > 0
    assert fit.a_discrepancy > 0


def test_natural_units_scalings():
    u = nq.natural_units(1e-18, 1e20)
    u2m = nq.natural_units(2e-18, 1e20)
    assert u2m.t_u / u.t_u == pytest.approx(2 ** (2 / 3), rel=1e-12)
    u2l = nq.natural_units(1e-18, 2e20)
    assert u2l.x_u / u.x_u == pytest.approx(2 ** (-1 / 6), rel=1e-12)
    assert nq.natural_units(1e-18, 1e20, a=1e-12).omega_SI == pytest.approx(
        2e-12 * math.sqrt(2e20 / 1e-18), rel=1e-12
    )


@given(
    log_m=st.floats(-21, -14),
    log_lam=st.floats(10, 30),
)
def test_natural_units_round_trip(log_m, log_lam):
    mass, lam = 10.0**log_m, 10.0**log_lam
    units = nq.natural_units(mass, lam)
    m2, lam2 = material_from_units(units.t_u, units.x_u)
    assert m2 == pytest.approx(mass, rel=1e-12)
    assert lam2 == pytest.approx(lam, rel=1e-12)


def test_feasibility_flags():
    rows = nq.feasibility_report((1e-14, 1e-14), (5e-6, 5e-6), (1e-3, 1e-3), samples=1)
    assert len(rows) == 1
    assert rows[0].flags["mass"]  # 1e-14 kg sits at the top of the band
    assert rows[0].frequency == pytest.approx(
        math.sqrt(1e-3 / 1e-14) / (2 * math.pi), rel=1e-12
    )
    # 10 kHz characteristic frequency fails the band
    kappa_10khz = 1e-14 * (2 * math.pi * 1e4) ** 2
    slow = nq.feasibility_report((1e-14, 1e-14), (5e-6, 5e-6), (kappa_10khz, kappa_10khz), samples=1)
    assert slow[0].frequency == pytest.approx(1e4, rel=1e-9)
    assert not slow[0].flags["frequency"]
    assert not slow[0].candidate


def test_feasibility_candidate_exists():
    # m = 1e-16 kg at ~1 GHz puts x_u inside the displacement band
    m = 1e-16
    kappa = m * (2 * math.pi * 0.9e9) ** 2
    rows = nq.feasibility_report((m, m), (5e-6, 5e-6), (kappa, kappa), samples=1)
    assert rows[0].candidate, rows[0]
    assert 1e-14 <= rows[0].x_u <= 1e-13


def test_feasibility_quantum_regime_scale():
    # representative NEMS: m = 1e-18 kg at 100 MHz gives picometer x_u
    m = 1e-18
    kappa = m * (2 * math.pi * 1e8) ** 2
    rows = nq.feasibility_report((m, m), (5e-6, 5e-6), (kappa, kappa), samples=1)
    assert 1e-13 < rows[0].x_u < 1e-11


def test_feasibility_validation():
    with pytest.raises(ConfigError):
        nq.feasibility_report((0, 1), (1e-6, 1e-5), (1, 10))
    with pytest.raises(ConfigError):
        nq.feasibility_report((1e-18, 1e-19), (1e-6, 1e-5), (1, 10))
