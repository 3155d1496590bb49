import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qogyro.errors import DomainError, RegimeError
from qogyro.spectral import SpectralDensity
from qogyro.spectrum import (
    Regime,
    analyze,
    asymptotic_u,
    bound_state_gradient,
    continuum_weight,
    find_bound_state,
    report_lines,
    self_energy,
    self_energy_at_zero,
    theta_density,
    threshold_cutoff,
    weight_gradient,
)
from qogyro.volterra import ProbeConfig

from oracles import mp_self_energy

CFG = ProbeConfig(Omega=0.01, N=100)


@pytest.mark.parametrize("E", [-0.01, -0.5, -3.0])
def test_self_energy_against_mpmath(E):
    J = SpectralDensity(0.05, 25.0, 1.0)
    assert self_energy(J, 0.99, E) == pytest.approx(mp_self_energy(0.05, 25.0, 1.0, 0.99, E), rel=1e-10)


def test_self_energy_domain():
    with pytest.raises(DomainError):
        self_energy(SpectralDensity(0.05, 25.0), 1.0, 0.0)


def test_self_energy_limit_at_zero():
    J = SpectralDensity(0.05, 25.0, 1.0)
    assert self_energy(J, 1.01, -1e-9) == pytest.approx(self_energy_at_zero(J, 1.01), abs=1e-6)


def test_thresholds_closed_form():
    J = SpectralDensity(0.05, 25.0, 1.0)
    assert threshold_cutoff(J, CFG.omega1) == pytest.approx(20.2, rel=1e-14)
    assert threshold_cutoff(J, CFG.omega2) == pytest.approx(19.8, rel=1e-14)
    assert threshold_cutoff(SpectralDensity(0.0, 1.0), 1.0) == math.inf


@pytest.mark.parametrize("wc,regime", [(2.0, Regime.NONE), (20.0, Regime.ONE_BOUND), (25.0, Regime.TWO_BOUND)])
def test_regimes(wc, regime):
    report = analyze(SpectralDensity(0.05, wc, 1.0), CFG)
    assert report.regime is regime
    if regime is Regime.ONE_BOUND:
        assert report.bound2 is not None and report.bound1 is None


@settings(max_examples=25, deadline=None)
@given(a=st.floats(1.0, 40.0), b=st.floats(1.0, 40.0))
def test_bound_states_only_appear_with_growing_cutoff(a, b):
    lo, hi = sorted((a, b))
    count = lambda wc: sum(x is not None for x in (lambda r: (r.bound1, r.bound2))(analyze(SpectralDensity(0.05, wc), CFG)))
    assert count(lo) <= count(hi)


@pytest.mark.parametrize("omega", [0.99, 1.01])
def test_root_residual(omega):
    J = SpectralDensity(0.05, 25.0, 1.0)
    b = find_bound_state(J, omega)
    assert b.energy < 0 and 0 < b.weight < 1
    assert abs(self_energy(J, omega, b.energy) - b.energy) < 1e-10


def test_no_bound_state_when_decoupled():
    assert find_bound_state(SpectralDensity(0.0, 25.0), 1.0) is None


@pytest.mark.parametrize("wc,omega", [(25.0, 1.01), (25.0, 0.99), (2.0, 1.0)])
def test_completeness(wc, omega):
    J = SpectralDensity(0.05, wc, 1.0)
    b = find_bound_state(J, omega)
    Z = 0.0 if b is None else b.weight
    assert Z + continuum_weight(J, omega) == pytest.approx(1.0, abs=1e-4)


def test_theta_density_domain_and_shape():
    J = SpectralDensity(0.05, 25.0, 1.0)
    vals = theta_density(J, 1.0, np.array([0.5, 1.0, 2.0]))
    assert np.all(vals > 0)
    with pytest.raises(DomainError):
        theta_density(J, 1.0, 0.0)


def test_energy_gradient_against_finite_difference():
    J = SpectralDensity(0.05, 25.0, 1.0)
    g1, g2 = bound_state_gradient(J, CFG)
    h = 1e-5
    plus = analyze(J, ProbeConfig(Omega=CFG.Omega + h))
    minus = analyze(J, ProbeConfig(Omega=CFG.Omega - h))
    fd1 = (plus.bound1.energy - minus.bound1.energy) / (2 * h)
    fd2 = (plus.bound2.energy - minus.bound2.energy) / (2 * h)
    assert g1 == pytest.approx(fd1, rel=1e-4)
    assert g2 == pytest.approx(fd2, rel=1e-4)
    assert g1 > 0 > g2


def test_weight_gradient_sign():
    # deeper binding at larger w_l would lower Z; here w_1 grows with Omega
    report = analyze(SpectralDensity(0.05, 25.0, 1.0), CFG)
    d1, d2 = weight_gradient(report)
    assert math.isfinite(d1) and math.isfinite(d2)
    assert d1 * d2 < 0


def test_require_two_names_thresholds():
    report = analyze(SpectralDensity(0.05, 20.0, 1.0), CFG)
    with pytest.raises(RegimeError, match="20.2"):
        report.require_two()


def test_asymptotic_u():
    report = analyze(SpectralDensity(0.05, 25.0, 1.0), CFG)
    u1, u2 = asymptotic_u(report, np.array([0.0, 10.0]))
    assert abs(u1[0]) == pytest.approx(report.bound1.weight)
    assert abs(u2[1]) == pytest.approx(report.bound2.weight)
    none = analyze(SpectralDensity(0.05, 2.0, 1.0), CFG)
    assert asymptotic_u(none, 3.0) == (0j, 0j)


def test_report_lines_keys():
    keys = dict(report_lines(analyze(SpectralDensity(0.05, 2.0, 1.0), CFG)))
    assert keys["regime"] == "None" and keys["E_b1"] == "absent"
