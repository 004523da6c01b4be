import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramanopt.core import (
    AtomicEnsemble,
    InvalidArgument,
    PulseKind,
    PulseSpec,
    QuadratureRule,
    SpatialGrid,
    SpinWave,
    UnsupportedGrid,
    exponential_spin_wave,
    flat_spin_wave,
    make_grid,
    mhz_to_rad_s,
    pi_read_pulse,
    rad_s_to_mhz,
    reverse,
    spin_wave_from_samples,
    write_pulse,
)


def test_midpoint_two_points():
    g = make_grid(2, QuadratureRule.MIDPOINT)
    assert g.nodes.tolist() == [0.25, 0.75]
    assert g.weights.tolist() == [0.5, 0.5]


@pytest.mark.parametrize("n", [2, 3, 17, 64, 512])
@pytest.mark.parametrize("rule", list(QuadratureRule))
def test_grid_invariants(n, rule):
    g = make_grid(n, rule)
    assert g.n_points == n
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[0] > 0 and g.nodes[-1] < 1
    assert abs(g.weights.sum() - 1) <= 1e-14
    assert abs(g.weights @ g.nodes - 0.5) <= 1e-14
    assert g.is_symmetric()


def test_gauss_legendre_exponential_integral():
    g = make_grid(512)
    assert abs(g.weights @ np.exp(-g.nodes) - (1 - math.exp(-1))) < 1e-12


def test_quadrature_convergence_midpoint():
    # the monotonicity check needs a rule whose error is not already at round-off
    exact = 1 - math.exp(-1)
    errs = [abs(make_grid(n, QuadratureRule.MIDPOINT).integrate(np.exp(-make_grid(n, QuadratureRule.MIDPOINT).nodes)) - exact)
            for n in (64, 128, 256)]
    assert errs[0] >= errs[1] >= errs[2]


def test_quadrature_convergence_gauss():
    exact = 1 - math.exp(-1)
    errs = [abs(make_grid(n).integrate(np.exp(-make_grid(n).nodes)) - exact) for n in (4, 8, 16)]
    assert errs[0] >= errs[1] >= errs[2]
    for n in (64, 128, 256):
        g = make_grid(n)
        assert abs(g.integrate(np.exp(-g.nodes)) - exact) < 1e-14


@pytest.mark.parametrize("n", [0, 1, -3, 2.5])
def test_make_grid_rejects(n):
    with pytest.raises(InvalidArgument):
        make_grid(n)


def test_flat_wave():
    g = make_grid(2, QuadratureRule.MIDPOINT)
    s = flat_spin_wave(g)
    assert s.amplitude.tolist() == [1.0, 1.0]
    assert s.norm == 1.0
    assert flat_spin_wave(make_grid(512)).is_normalized()


def test_exponential_zero_is_flat():
    g = make_grid(64)
    assert np.array_equal(exponential_spin_wave(g, 0.0).amplitude, flat_spin_wave(g).amplitude)


def test_exponential_ratio():
    g = make_grid(512)
    s = exponential_spin_wave(g, 2.0)
    # amplitude is proportional to exp(-x), compare the extreme nodes
    ratio = s.amplitude[-1] / s.amplitude[0]
    assert ratio == pytest.approx(math.exp(-(g.nodes[-1] - g.nodes[0])), rel=1e-14)
    assert abs(s.norm - 1) < 1e-10


def test_exponential_rejects_negative():
    with pytest.raises(InvalidArgument):
        exponential_spin_wave(make_grid(8), -1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 50))
def test_exponential_always_normalized(alpha):
    assert abs(exponential_spin_wave(make_grid(512), alpha).norm - 1) < 1e-10


def test_reverse_flat_unchanged():
    s = flat_spin_wave(make_grid(33))
    assert np.array_equal(reverse(s).amplitude, s.amplitude)


def test_reverse_exponential_mirror():
    s = exponential_spin_wave(make_grid(128), 2.0)
    r = reverse(s)
    assert np.all(np.diff(r.amplitude) > 0)
    assert np.array_equal(reverse(r).amplitude, s.amplitude)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=16, max_size=16))
def test_reverse_involution(values):
    s = SpinWave(make_grid(16, QuadratureRule.MIDPOINT), np.array(values, dtype=complex))
    assert np.array_equal(reverse(reverse(s)).amplitude, s.amplitude)


def test_reverse_rejects_asymmetric_grid():
    nodes = np.array([0.1, 0.2, 0.9])
    g = SpatialGrid(3, nodes, np.full(3, 1 / 3), QuadratureRule.MIDPOINT)
    with pytest.raises(UnsupportedGrid):
        reverse(SpinWave(g, np.ones(3)))


def test_spin_wave_is_immutable():
    s = flat_spin_wave(make_grid(8))
    with pytest.raises(ValueError):
        s.amplitude[0] = 2.0


def test_spin_wave_shape_checked():
    with pytest.raises(InvalidArgument):
        SpinWave(make_grid(8), np.ones(7))


def test_spin_from_samples_roundtrip():
    g = make_grid(64)
    x = np.linspace(0, 1, 2001)
    s = spin_wave_from_samples(g, x, np.exp(-1.5 * x))
    ref = exponential_spin_wave(g, 3.0)
    assert np.max(np.abs(s.amplitude - ref.amplitude)) < 1e-6


@pytest.mark.parametrize("kwargs", [
    dict(d=0, d_bar=1, gamma_eg=1, gamma_es=1),
    dict(d=1, d_bar=-1, gamma_eg=1, gamma_es=1),
    dict(d=1, d_bar=1, gamma_eg=0, gamma_es=1),
    dict(d=1, d_bar=1, gamma_eg=1, gamma_es=1, gamma_0=-1),
    dict(d=1, d_bar=1, gamma_eg=1, gamma_es=1, length=0),
])
def test_ensemble_invariants(kwargs):
    with pytest.raises(InvalidArgument):
        AtomicEnsemble(**kwargs)


def test_pulse_shapes():
    w = write_pulse(2.0, 0.5)
    assert w.rabi(0.0) == 2.0
    assert w.rabi(-0.5) == pytest.approx(2.0 / math.e)
    assert w.rabi(0.1) == 0.0
    r = pi_read_pulse(4.0)
    assert 2 * r.omega_max * r.duration == pytest.approx(math.pi)
    assert r.rabi(r.duration / 2) == 4.0 and r.rabi(r.duration * 1.01) == 0.0
    with pytest.raises(InvalidArgument):
        PulseSpec(PulseKind.READ_SQUARE, -1.0, 1.0)
    with pytest.raises(InvalidArgument):
        PulseSpec(PulseKind.READ_SQUARE, 1.0, 0.0)
    with pytest.raises(InvalidArgument):
        PulseSpec(PulseKind.CUSTOM, 1.0, 1.0)


def test_unit_conversion():
    assert mhz_to_rad_s(1.0) == pytest.approx(2 * math.pi * 1e6)
    assert rad_s_to_mhz(mhz_to_rad_s(6.067)) == pytest.approx(6.067)
