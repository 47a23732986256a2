import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import nemsqubit as nq
from nemsqubit.errors import ConfigError, DomainError
from nemsqubit.grids import probe_amplitude


def test_build_grid_spacing():
    g = nq.build_grid(-8, 8, 1025)
    assert g.spacing == 0.015625
    assert g.symmetric
    g2 = nq.build_grid(-12, 12, 2049)
    assert g2.spacing == 24 / 2048 == 0.01171875


def test_build_grid_points_exact():
    g = nq.build_grid(-8, 8, 1025)
    x = g.points()
    assert x[0] == -8.0
    assert x[-1] == pytest.approx(8.0, abs=1e-12)
    assert np.all(np.diff(x) > 0)


@pytest.mark.parametrize(
    "args",
    [(-8, 8, 2), (-8, 8, 15), (8, -8, 100), (float("nan"), 8, 100), (-8, float("inf"), 100)],
)
def test_build_grid_rejects_bad_input(args):
    with pytest.raises(ConfigError):
        nq.build_grid(*args)


def test_state_norm_and_normalize():
    g = nq.build_grid(-8, 8, 513)
    x = g.points()
    psi = np.exp(-(x**2)) * (1 + 0j)
    state = nq.WavefunctionState(g, psi).normalized()
    assert abs(state.norm() - 1.0) < 1e-12


def test_state_shape_mismatch():
    g = nq.build_grid(-8, 8, 513)
    with pytest.raises(ConfigError):
        nq.WavefunctionState(g, np.zeros(100, complex))


def test_mirror_reverses_amplitudes():
    g = nq.build_grid(-8, 8, 513)
    x = g.points()
    state = nq.WavefunctionState(g, np.exp(-((x - 2.0) ** 2)) + 0j).normalized()
    m = nq.mirror(state)
    mag_orig, _ = nq.observe(state, 2.0)
    mag_mirr, _ = nq.observe(m, -2.0)
    assert mag_mirr == pytest.approx(mag_orig, rel=1e-12)


def test_observe_gaussian_peak_value():
    # |psi(+A)| of the plus well state is (2 A sqrt(2) / pi)^(1/4)
    params = nq.DoubleWellParams(A=3.0)
    g = nq.default_grid(params)
    state = nq.gaussian_state(params, "plus", g)
    mag, phase = nq.observe(state, 3.0)
    assert mag == pytest.approx((2 * 3 * math.sqrt(2) / math.pi) ** 0.25, rel=1e-4)
    assert 0.0 <= phase < 2 * math.pi
    mag_far, _ = nq.observe(state, -3.0)
    assert mag_far < 1e-6


def test_observe_outside_domain():
    g = nq.build_grid(-8, 8, 513)
    state = nq.WavefunctionState(g, np.ones(513, complex)).normalized()
    with pytest.raises(DomainError):
        nq.observe(state, 9.0)


@given(
    coeffs=st.tuples(*[st.floats(-2, 2) for _ in range(4)]),
    t=st.floats(0.02, 0.98),
)
def test_cubic_probe_exact_for_cubics(coeffs, t):
    # cubic interpolation reproduces any cubic polynomial exactly
    g = nq.build_grid(-4, 4, 65)
    x = g.points()
    a, b, c, d = coeffs
    poly = a + b * x + c * x**2 + d * x**3
    state = nq.WavefunctionState(g, poly + 0j)
    probe = g.x_min + t * (g.x_max - g.x_min)
    expected = a + b * probe + c * probe**2 + d * probe**3
    assert probe_amplitude(state, probe).real == pytest.approx(expected, abs=1e-9)


def test_inner_product_requires_shared_grid():
    g1 = nq.build_grid(-8, 8, 513)
    g2 = nq.build_grid(-8, 8, 257)
    s1 = nq.WavefunctionState(g1, np.ones(513, complex))
    s2 = nq.WavefunctionState(g2, np.ones(257, complex))
    with pytest.raises(ConfigError):
        nq.inner(s1, s2)
