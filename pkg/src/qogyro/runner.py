"""Evaluate a scenario into series and metadata, without touching the disk."""

from dataclasses import dataclass, field
import math

import numpy as np

from . import __version__, _backend
from .errors import QogError
from .scenario import Scenario
from .sensitivity import (
    SensitivitySeries,
    asymptotic_series,
    exact_sensitivity,
    ideal_series,
    local_minima_envelope,
    markovian_series,
)
from .spectrum import analyze, report_lines
from .volterra import TimeGrid, check_trajectory, default_dt, solve, solve_converged


@dataclass
class RunResult:
    scenario: Scenario
    series: SensitivitySeries
    envelope: SensitivitySeries | None
    trajectory: object = None
    meta: list = field(default_factory=list)

    def headline(self):
        """(value, time, flag) summarizing the run for sweeps."""
        if self.scenario.measure == "final":
            i = len(self.series) - 1
            flag = self.series.flags[i]
            return float(self.series.delta_omega[i]), float(self.series.times[i]), flag
        if self.envelope is not None and len(self.envelope):
            i = self.envelope.argmin()
            return float(self.envelope.delta_omega[i]), float(self.envelope.times[i]), "ok"
        i = self.series.argmin()
        if i is None:
            return math.inf, math.nan, "no_finite_value"
        return float(self.series.delta_omega[i]), float(self.series.times[i]), "no_local_minimum"


def analytic_dt(sc: Scenario) -> float:
    return min(sc.t_max / 1e5, 0.01 / max(1.0, abs(sc.Omega)))


def analytic_times(sc: Scenario, dt):
    grid = TimeGrid(sc.t_max, dt)
    return grid.times[1:]


def run(sc: Scenario) -> RunResult:
    meta = [("version", __version__), ("backend", _backend.NAME)]
    traj = None
    N = sc.photons
    meta.append(("N_resolved", N))
    if sc.pipeline == "ideal":
        dt = sc.dt or analytic_dt(sc)
        series = ideal_series(N, sc.Omega, analytic_times(sc, dt))
    elif sc.pipeline == "markovian":
        dt = sc.dt or analytic_dt(sc)
        if sc.kappa is not None:
            kappa = sc.kappa
            meta.append(("kappa_source", "direct"))
        else:
            kappa = sc.spectral().decay_rate(1.0)
            meta.append(("kappa_source", "pi J(omega_0)"))
        meta.append(("kappa_resolved", kappa))
        series = markovian_series(N, kappa, sc.Omega, analytic_times(sc, dt))
    elif sc.pipeline == "asymptotic":
        dt = sc.dt or analytic_dt(sc)
        report = analyze(sc.spectral(), sc.probe())
        meta.extend(report_lines(report))
        series = asymptotic_series(report, N, sc.Omega, analytic_times(sc, dt))
        meta.extend([("dZ1_dOmega", series.meta["dZ1"]), ("dZ2_dOmega", series.meta["dZ2"])])
    else:
        J, cfg = sc.spectral(), sc.probe()
        meta.extend(report_lines(analyze(J, cfg)))
        if sc.converge:
            traj, conv = solve_converged(J, cfg, sc.t_max, sc.dt, rtol=sc.rtol)
            meta.extend(conv.as_dict().items())
        else:
            traj = solve(J, cfg, TimeGrid(sc.t_max, sc.dt or default_dt(J, cfg)))
            meta.append(("converged", "not checked"))
        check_trajectory(traj)
        dt = traj.grid.dt
        series = exact_sensitivity(J, cfg, traj.grid)
        meta.extend(
            [
                ("memory_depth_steps", traj.info["memory_depth_steps"]),
                ("memory_truncated", traj.info["memory_truncated"]),
                ("fd_min_step", series.meta["fd_min_step"]),
            ]
        )
    meta.append(("dt_resolved", dt))
    series = series.window(sc.t_min, sc.t_max)
    try:
        envelope = local_minima_envelope(series)
    except QogError:
        envelope = None
    meta.append(("envelope_points", 0 if envelope is None else len(envelope)))
    result = RunResult(sc, series, envelope, traj, meta)
    value, t_at, flag = result.headline()
    meta.extend([("min_delta_omega", value), ("t_at_min", t_at), ("headline_flag", flag)])
    return result


def trajectory_columns(traj):
    t = traj.times
    return [t, traj.u1.real, traj.u1.imag, traj.u2.real, traj.u2.imag, np.abs(traj.u1), np.abs(traj.u2)]
