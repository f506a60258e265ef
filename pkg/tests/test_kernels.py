import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from qbm_esd import (DivergenceError, DomainError, KernelSet, PhysicalParams, green_function, msd,
                     oscillator_correlation, velocity_variance)
from qbm_esd.bath import im_alpha
from qbm_esd.oracles import quadrature_kernel_oracle as oracle

# frozen oracle values (natural units, T = 0, gamma tau = 5)
S_AT_1 = 0.1911277461695748
SDOT_AT_1 = 0.3726951275778561
V2_SRT5 = 0.19647936737336344
V2_SRT02 = 0.6850171050536886


def test_green_at_origin(srt5):
    G, Gd = green_function(0.0, srt5)
    assert G == 0.0
    assert Gd == pytest.approx(1.0, rel=1e-12)


def test_sum_rule_by_quadrature():
    p = PhysicalParams(m=2.5, tau=3.0)
    assert oracle(0.0, p, "Gdot") == pytest.approx(1 / 2.5, rel=1e-8)


def test_ohmic_green_at_gamma_t_one(ohmic):
    assert green_function(1.0, ohmic)[0] == pytest.approx(1 - np.exp(-1.0), rel=1e-14)


def test_msd_at_origin(srt5):
    s, sd = msd(0.0, srt5)
    assert s == 0.0 and sd == 0.0


def test_msd_golden(srt5):
    s, sd = msd(1.0, srt5)
    assert s > 0
    assert s == pytest.approx(S_AT_1, rel=1e-10)
    assert sd == pytest.approx(SDOT_AT_1, rel=1e-10)


@pytest.mark.parametrize("name", ["srt5", "srt02"])
def test_finite_differences(name, request):
    k = request.getfixturevalue(name)
    h = 1e-3
    t = np.linspace(0.1, 20.0, 60)
    assert np.max(np.abs((msd(t + h, k)[0] - msd(t - h, k)[0]) / (2 * h) - msd(t, k)[1])) < 1e-4
    assert np.max(np.abs((k.green(t + h)[0] - k.green(t - h)[0]) / (2 * h) - k.green(t)[1])) < 1e-4


def test_velocity_variance_golden(srt5, srt02):
    assert velocity_variance(srt5) == pytest.approx(V2_SRT5, rel=1e-12)
    assert velocity_variance(srt02) == pytest.approx(V2_SRT02, rel=1e-12)
    assert velocity_variance(srt5) == pytest.approx(oracle(0.0, srt5.params, "v2"), rel=1e-6)


def test_velocity_variance_linear_in_hbar():
    a = velocity_variance(KernelSet(PhysicalParams(tau=5.0)))
    b = velocity_variance(KernelSet(PhysicalParams(tau=5.0, hbar=2.0)))
    assert b == pytest.approx(2 * a, rel=1e-13)


def test_ohmic_velocity_variance_diverges(ohmic):
    with pytest.raises(DivergenceError):
        velocity_variance(ohmic)
    p = ohmic.params
    f = lambda w: w**2 * im_alpha(w, p) / np.pi
    partial = [integrate.quad(f, 0, 10.0**k, limit=200)[0] for k in range(2, 7)]
    # each decade adds hbar zeta ln(10) / (pi m^2): logarithmic growth, no limit
    steps = np.diff(partial)
    np.testing.assert_allclose(steps, np.log(10) / np.pi, rtol=1e-3)


def test_ohmic_velocity_variance_diverges_at_finite_temperature():
    with pytest.raises(DivergenceError):
        KernelSet(PhysicalParams(temperature=1.0)).velocity_variance()


def test_correlation_requires_oscillator(srt5):
    with pytest.raises(DomainError):
        oscillator_correlation(1.0, srt5)


@pytest.fixture(scope="module")
def osc():
    return KernelSet(PhysicalParams(tau=5.0, omega0=0.7))


def test_correlation_at_origin(osc):
    c, cd, x2 = oscillator_correlation(0.0, osc)
    assert c == pytest.approx(x2, rel=1e-14)
    assert cd == 0.0


def test_msd_from_correlation(osc):
    t = np.linspace(0.0, 20.0, 41)
    c, _, x2 = osc.correlation(t)
    s, _ = osc.msd(t)
    np.testing.assert_allclose(s, 2 * x2 - 2 * c, rtol=1e-8, atol=1e-8 * x2)


def test_oscillator_kernels_match_oracle(osc):
    for t in (0.0, 1.5, 6.0):
        assert osc.correlation(t)[0] == pytest.approx(oracle(t, osc.params, "c"), rel=1e-6, abs=1e-9)
    assert osc.velocity_variance() == pytest.approx(0.4079123398821097, rel=1e-10)
    assert osc.msd(3.0)[0] == pytest.approx(2.1121259991448875, rel=1e-10)


def test_undamped_correlation_limit():
    k = KernelSet(PhysicalParams(zeta=1e-3, omega0=1.0))
    t = np.array([0.0, 1.0, 2.0, 5.0])
    c = k.correlation(t)[0]
    np.testing.assert_allclose(c, 0.5 * np.cos(t), atol=2e-3)


def test_weakly_damped_correlation_against_oracle():
    p = PhysicalParams(zeta=0.05, omega0=1.0)
    k = KernelSet(p)
    for t in (0.5, 3.0):
        assert k.correlation(t)[0] == pytest.approx(oracle(t, p, "c"), rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(t=st.floats(0.0, 40.0), tau=st.floats(0.1, 10.0), w0=st.floats(0.2, 2.0))
def test_correlation_bounded(t, tau, w0):
    k = KernelSet(PhysicalParams(tau=tau, omega0=w0))
    c, _, x2 = k.correlation(t)
    assert abs(c) <= x2 * (1 + 1e-12)


def test_quadrature_method_agrees_with_poles(srt5):
    q = KernelSet(srt5.params, "quadrature")
    t = np.array([0.0, 0.3, 2.5, 11.0, 19.0])
    np.testing.assert_allclose(q.green(t)[0], srt5.green(t)[0], rtol=1e-8, atol=1e-14)
    np.testing.assert_allclose(q.msd(t)[0], srt5.msd(t)[0], rtol=1e-8, atol=1e-14)
    assert q.velocity_variance() == pytest.approx(srt5.velocity_variance(), rel=1e-8)


def test_finite_temperature_against_oracle():
    p = PhysicalParams(tau=5.0, temperature=0.5)
    k = KernelSet(p)
    for t in (0.7, 4.0):
        assert k.msd(t)[0] == pytest.approx(oracle(t, p, "s"), rel=1e-6)
    assert k.velocity_variance() == pytest.approx(oracle(0.0, p, "v2"), rel=1e-6)
    # heating raises the velocity spread
    assert k.velocity_variance() > V2_SRT5


def test_kernels_are_pure(srt5):
    t = np.linspace(0, 20, 11)
    a, b = srt5.msd(t), srt5.msd(t)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_degenerate_case_falls_back_to_quadrature(caplog):
    p = PhysicalParams(zeta=2.0, omega0=1.0)
    with caplog.at_level(logging.WARNING):
        k = KernelSet(p)
    assert k.method == "quadrature" and "quadrature" in caplog.text
    # critically damped: G = t e^{-t}
    assert k.green(1.5)[0] == pytest.approx(1.5 * np.exp(-1.5), rel=1e-7)


def test_negative_time_rejected(srt5):
    with pytest.raises(DomainError):
        srt5.green(-1.0)


def test_unknown_method():
    with pytest.raises(ValueError):
        KernelSet(PhysicalParams(tau=1.0), "magic")
