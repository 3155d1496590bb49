import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qogyro.errors import DomainError
from qogyro.spectral import SpectralDensity, kernel_by_quadrature

from oracles import mp_kernel, mp_lamb_shift, mp_spectral


def test_evaluate_matches_definition():
    J = SpectralDensity(0.05, 2.0, 0.5)
    w = np.array([0.0, 0.3, 1.0, 7.5])
    expect = 0.05 * w**0.5 * 2.0**0.5 * np.exp(-w / 2.0)
    assert np.allclose(J.evaluate(w), expect, rtol=1e-15, atol=0)


@pytest.mark.parametrize("kw", [dict(eta=-1, omega_c=1), dict(eta=0.1, omega_c=0), dict(eta=0.1, omega_c=1, s=0)])
def test_invalid_parameters(kw):
    with pytest.raises(DomainError):
        SpectralDensity(**kw)


def test_negative_frequency_rejected():
    with pytest.raises(DomainError):
        SpectralDensity(0.1, 1.0).evaluate(-0.1)
    with pytest.raises(DomainError):
        SpectralDensity(0.1, 1.0).kernel(-1.0)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("x", [0.0, 0.4, 3.0])
def test_kernel_against_mpmath(s, x):
    J = SpectralDensity(0.05, 2.0, s)
    ref = mp_kernel(0.05, 2.0, s, x)
    assert abs(J.kernel(x) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("wc", [2.0, 20.0, 25.0])
def test_kernel_against_oscillatory_quadrature(wc):
    J = SpectralDensity(0.05, wc, 1.0)
    for x in np.linspace(0, 50, 11):
        ref = kernel_by_quadrature(J, x)
        assert abs(J.kernel(x) - ref) <= 1e-8 * abs(ref)


def test_kernel_at_zero_is_total_spectral_weight():
    J = SpectralDensity(0.3, 4.0, 1.5)
    ref = mp.quad(mp_spectral(0.3, 4.0, 1.5), [0, mp.inf])
    assert J.kernel(0.0) == pytest.approx(float(ref), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(
    s=st.floats(0.2, 3.0),
    wc=st.floats(0.5, 50.0),
    thr=st.sampled_from([1e-4, 1e-8, 1e-12]),
)
def test_modulus_depth_hits_threshold(s, wc, thr):
    J = SpectralDensity(1.0, wc, s)
    x = J.kernel_modulus_depth(thr)
    ratio = abs(J.kernel(x)) / abs(J.kernel(0.0))
    assert ratio == pytest.approx(thr, rel=1e-8)


@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_total_weight_closed_form(s):
    J = SpectralDensity(0.05, 3.0, s)
    J_mp = mp_spectral(0.05, 3.0, s)
    # w = y^2 removes the endpoint singularity of J(w)/w for s < 1
    ref = mp.quad(lambda y: 2 * J_mp(y * y) / y, [0, 1, mp.inf])
    assert J.total_weight() == pytest.approx(float(ref), rel=1e-12)


def test_decay_rate():
    J = SpectralDensity(0.05, 25.0, 1.0)
    assert J.decay_rate(1.01) == pytest.approx(math.pi * 0.05 * 1.01 * math.exp(-1.01 / 25), rel=1e-15)
    with pytest.raises(DomainError):
        J.decay_rate(0.0)


@pytest.mark.parametrize("wc,s,e", [(2.0, 1.0, 1.0), (25.0, 1.0, 0.99), (5.0, 0.5, 1.01), (0.5, 2.0, 1.0)])
def test_lamb_shift_against_brute_principal_value(wc, s, e):
    mp.mp.dps = 30
    try:
        ref = mp_lamb_shift(0.05, wc, s, e)
    finally:
        mp.mp.dps = 15
    got = SpectralDensity(0.05, wc, s).lamb_shift(e)
    assert got == pytest.approx(ref, rel=1e-8)


def test_lamb_shift_decoupled():
    assert SpectralDensity(0.0, 2.0).lamb_shift(1.0) == 0.0
