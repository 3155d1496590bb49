import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qogyro import _backend
from qogyro._memory import solve_rotating
from qogyro.errors import DomainError, SolverDiagnosticError
from qogyro.spectral import SpectralDensity
from qogyro.volterra import (
    KernelTable,
    ProbeConfig,
    TimeGrid,
    check_trajectory,
    default_dt,
    masteq_coefficients,
    solve,
    solve_converged,
    solve_mode,
)

from oracles import brute_product

CFG = ProbeConfig(Omega=0.01, N=100)


def test_probe_config_from_squeezing_round_trip():
    cfg = ProbeConfig.from_squeezing(0.01, 1.3)
    assert cfg.N == pytest.approx(2 * math.sinh(1.3) ** 2, rel=1e-15)
    assert cfg.r == pytest.approx(1.3, rel=1e-14)
    assert (cfg.omega1, cfg.omega2) == (1.01, 0.99)


@pytest.mark.parametrize("kw", [dict(Omega=1.0), dict(Omega=0.1, N=-1), dict(Omega=0.1, omega0=2.0)])
def test_probe_config_rejects(kw):
    with pytest.raises(DomainError):
        ProbeConfig(**kw)


def test_decoupled_limit_is_free_rotation():
    grid = TimeGrid(100.0, 0.01)
    traj = solve(SpectralDensity(0.0, 2.0), CFG, grid)
    t = grid.times
    assert np.max(np.abs(traj.u1 - np.exp(-1.01j * t))) < 1e-8
    assert np.max(np.abs(traj.u2 - np.exp(-0.99j * t))) < 1e-8
    assert np.max(np.abs(np.abs(traj.u1) - 1)) < 1e-8


@pytest.mark.parametrize(
    "eta,wc,s,omega,dt,n",
    [(0.05, 2.0, 1.0, 1.01, 0.01, 150), (0.3, 5.0, 0.5, 0.8, 0.004, 200), (0.05, 25.0, 1.0, 0.99, 0.002, 300)],
)
def test_matches_direct_product_rule(eta, wc, s, omega, dt, n):
    u, _ = solve_mode(SpectralDensity(eta, wc, s), omega, TimeGrid(n * dt, dt))
    ref = brute_product(eta, wc, s, omega, dt, n)
    assert np.max(np.abs(u - ref)) < 1e-12


def _direct_history(g, dt, n, depth, corr):
    # O(n * depth) version of the stepper convention used by solve_rotating
    v = np.zeros(n + 1, complex)
    d = np.zeros(n + 1, complex)
    v[0] = 1
    for k in range(1, n + 1):
        lo = max(0, k - depth)
        w = v[lo:k].copy()
        if lo == 0:
            w[0] *= 0.5
        hist = np.dot(g[k - lo : 0 : -1], w) + corr[k]
        vp = v[k - 1] + dt * d[k - 1]
        dp = -dt * (hist + 0.5 * g[0] * vp)
        v[k] = v[k - 1] + 0.5 * dt * (d[k - 1] + dp)
        d[k] = -dt * (hist + 0.5 * g[0] * v[k])
    return v


@pytest.mark.parametrize("depth", [40, 300, 5000])
@pytest.mark.parametrize("backend", sorted(_backend.BACKENDS))
def test_block_history_equals_direct_sum(depth, backend):
    rng = np.random.default_rng(7)
    n, dt = 700, 0.01
    lag = np.arange(min(depth, n) + 1)
    # damped, rotating kernel; positive definite, so |v| stays bounded
    g = 2.0 * np.exp(-0.02 * lag + 0.3j * dt * lag)
    corr = np.zeros(n + 1, complex)
    corr[1:] = 1e-4 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    v, _ = solve_rotating(g, dt, n, depth, _backend.BACKENDS[backend], corr)
    ref = _direct_history(g, dt, n, depth, corr)
    assert np.max(np.abs(v[: n + 1] - ref)) < 1e-12


@pytest.mark.skipif(len(_backend.BACKENDS) < 2, reason="compiled extension not built")
def test_backends_agree():
    J = SpectralDensity(0.05, 25.0, 1.0)
    grid = TimeGrid(20.0, 0.001)
    a = solve(J, CFG, grid, step_block=_backend.BACKENDS["python"])
    b = solve(J, CFG, grid, step_block=_backend.BACKENDS["cython"])
    assert np.max(np.abs(a.u1 - b.u1)) < 1e-13
    assert np.max(np.abs(a.u2 - b.u2)) < 1e-13


def test_modes_are_independent_bitwise():
    J = SpectralDensity(0.05, 20.0, 1.0)
    grid = TimeGrid(10.0, 0.002)
    joint = solve(J, CFG, grid)
    u1, du1 = solve_mode(J, CFG.omega1, grid)
    u2, du2 = solve_mode(J, CFG.omega2, grid)
    assert np.array_equal(joint.u1, u1) and np.array_equal(joint.du1, du1)
    assert np.array_equal(joint.u2, u2) and np.array_equal(joint.du2, du2)


@settings(max_examples=20, deadline=None)
@given(
    eta=st.floats(0.0, 0.5),
    wc=st.floats(0.5, 30.0),
    s=st.floats(0.3, 2.5),
    omega=st.floats(0.2, 1.8),
    dt=st.floats(1e-4, 2e-3),
)
def test_short_time_expansion(eta, wc, s, omega, dt):
    J = SpectralDensity(eta, wc, s)
    u, _ = solve_mode(J, omega, TimeGrid(4 * dt, dt))
    C = abs(J.kernel(0.0)) / 2 + omega**2 / 2 + 0.1
    assert abs(u[1] - (1 - 1j * omega * dt)) <= C * dt**2


def test_grid_convergence_no_bound_state():
    J = SpectralDensity(0.05, 2.0, 1.0)
    traj, rep = solve_converged(J, CFG, 50.0)
    assert rep.converged and rep.rel_change < 1e-5
    assert traj.grid.dt == rep.dt
    fine = solve(J, CFG, traj.grid.halved())
    assert abs(fine.u1[-1] - traj.u1[-1]) < 1e-5 * abs(fine.u1[-1])


def test_decay_without_bound_state():
    J = SpectralDensity(0.05, 2.0, 1.0)
    traj = solve(J, CFG, TimeGrid(50.0, default_dt(J, CFG)))
    check_trajectory(traj)
    for u in (traj.u1, traj.u2):
        a = np.abs(u)
        # block maxima of |u| fall monotonically
        peaks = a[: a.size - a.size % 10].reshape(10, -1).max(axis=1)
        assert np.all(np.diff(peaks) < 0)
        assert a[-1] < 0.2


def test_weak_coupling_matches_exponential_decay():
    J = SpectralDensity(1e-3, 2.0, 1.0)
    omega = CFG.omega1
    kappa = J.decay_rate(omega)
    grid = TimeGrid(10 / kappa, 0.02)
    u, _ = solve_mode(J, omega, grid)
    t = grid.times
    window = (t >= 5 / kappa) & (t <= 10 / kappa)
    ref = np.exp(-kappa * t[window])
    assert np.max(np.abs(np.abs(u[window]) - ref) / ref) < 0.05


def test_masteq_decoupled():
    grid = TimeGrid(10.0, 0.01)
    co = masteq_coefficients(solve(SpectralDensity(0.0, 2.0), CFG, grid))
    assert np.allclose(co[1]["varpi"], 1.01, atol=1e-12)
    assert np.allclose(co[2]["varpi"], 0.99, atol=1e-12)
    assert np.max(np.abs(co[1]["gamma"])) < 1e-12


def test_masteq_markovian_rate():
    J = SpectralDensity(7e-4, 2.0, 1.0)
    grid = TimeGrid(50.0, 0.005)
    traj = solve(J, CFG, grid)
    co = masteq_coefficients(traj)
    t = grid.times
    window = (t >= 20) & (t <= 50)
    for mode, omega in ((1, CFG.omega1), (2, CFG.omega2)):
        mean = np.mean(co[mode]["gamma"][window])
        assert mean == pytest.approx(J.decay_rate(omega), rel=0.2)


def test_masteq_backflow_witness():
    J = SpectralDensity(0.05, 25.0, 1.0)
    grid = TimeGrid(50.0, default_dt(J, CFG))
    co = masteq_coefficients(solve(J, CFG, grid))
    assert np.nanmin(co[1]["gamma"]) < 0


def test_masteq_flags_vanishing_amplitude():
    grid = TimeGrid(1.0, 0.1)
    traj = solve(SpectralDensity(0.0, 2.0), CFG, grid)
    traj.u1[3] = 0.0
    co = masteq_coefficients(traj)
    assert co[1]["undefined"][3] and np.isnan(co[1]["gamma"][3])


def test_coarse_step_raises_diagnostic():
    J = SpectralDensity(0.5, 25.0, 1.0)
    with pytest.raises(SolverDiagnosticError, match="dt"):
        solve(J, CFG, TimeGrid(50.0, 0.2))


def test_step_limit():
    with pytest.raises(DomainError):
        solve(SpectralDensity(0.05, 2.0), CFG, TimeGrid(1e6, 1e-2))


def test_memory_truncation_reported():
    J = SpectralDensity(0.05, 25.0, 1.0)
    table = KernelTable(J, 0.002, 10**6)
    assert table.truncated and table.depth < 10**6
    assert abs(J.kernel(table.depth * 0.002)) < 1e-8 * abs(J.kernel(0.0))
