"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 missing bound states,
4 numerical-consistency failure.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
import functools
import math
import sys

import click
import numpy as np

from . import __version__, io
from .errors import QogError
from .runner import run, trajectory_columns
from .scenario import Scenario, format_value, load
from .sensitivity import power_law_fit
from .spectral import SpectralDensity, kernel_by_quadrature
from .spectrum import analyze, report_lines
from .volterra import ProbeConfig

KERNEL_RTOL = 1e-8


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except QogError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _apply_overrides(sc: Scenario, dt, tmax, workers) -> Scenario:
    changes = {}
    if dt is not None:
        changes["dt"] = dt
    if tmax is not None:
        changes["t_max"] = tmax
    if workers is not None:
        changes["workers"] = workers
    return replace(sc, **changes) if changes else sc


def _common(fn):
    fn = click.option("--out", "out", type=click.Path(file_okay=False), default=".", show_default=True,
                      help="Directory for the CSV files and sidecar.")(fn)
    fn = click.option("--workers", type=click.IntRange(min=1), default=None,
                      help="Concurrent sweep points.")(fn)
    fn = click.option("--dt", type=click.FloatRange(min=0, min_open=True), default=None,
                      help="Time step, overrides [grid] dt.")(fn)
    fn = click.option("--tmax", type=click.FloatRange(min=0, min_open=True), default=None,
                      help="Horizon, overrides [grid] t_max.")(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="qogyro")
def main():
    """Sensing precision of a quantum optical gyroscope with photon loss."""


def _series_files(prefix, result):
    stride = result.scenario.stride
    files = {f"{prefix}.sensitivity.csv": io.sensitivity_csv(result.series, stride)}
    if result.envelope is not None:
        files[f"{prefix}.envelope.csv"] = io.sensitivity_csv(result.envelope)
    if result.trajectory is not None:
        files[f"{prefix}.trajectory.csv"] = io.csv_text(
            io.TRAJECTORY_HEADER, trajectory_columns(result.trajectory), stride
        )
    return files


@main.command("run")
@click.argument("scenario", type=click.Path(dir_okay=False))
@_common
@_guard
def run_cmd(scenario, out, workers, dt, tmax):
    """Evaluate a scenario file and write its series."""
    sc = _apply_overrides(load(scenario), dt, tmax, workers)
    files = {}
    if sc.sweep_param is None:
        result = run(sc)
        files.update(_series_files(sc.name, result))
        files[f"{sc.name}.sidecar.txt"] = sc.to_text(result.meta)
    else:
        points = [sc.with_value(sc.sweep_param, v) for v in sc.sweep_values]
        for point, result in zip(points, _map(run, points, sc.workers)):
            prefix = f"{sc.name}.{sc.sweep_param}={format_value(getattr(point, sc.sweep_param))}"
            files.update(_series_files(prefix, result))
            files[f"{prefix}.sidecar.txt"] = point.to_text(result.meta)
    for path in io.write_all(out, files):
        click.echo(path)


def _sweep_point(sc: Scenario):
    try:
        return run(sc).headline()
    except QogError as exc:
        return math.inf, math.nan, type(exc).__name__


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _parse_values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise click.BadParameter("the sweep list is empty")
    return vals


@main.command("sweep")
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("--param", required=True, help="Scalar scenario field to vary (eta, omega_c, s, kappa, Omega, N, r, t_max).")
@click.option("--values", "values_text", required=True, help="Comma-separated values.")
@_common
@_guard
def sweep_cmd(scenario, param, values_text, out, workers, dt, tmax):
    """One summary row per value: smallest delta Omega and where it occurs."""
    values = _parse_values(values_text)
    sc = _apply_overrides(load(scenario), dt, tmax, workers)
    sc = replace(sc, sweep_param=param, sweep_values=tuple(values))
    points = [sc.with_value(param, v) for v in values]
    rows = _map(_sweep_point, points, sc.workers)

    columns = [[param] * len(values), values, [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]]
    meta = [("version", __version__), ("rows", len(rows))]
    good = [(v, r[0]) for v, r in zip(values, rows) if r[2] == "ok" and v > 0 and 0 < r[0] < math.inf]
    if len(good) >= 5:
        fit = power_law_fit(good)
        meta.extend((f"fit_{k}", v) for k, v in fit.lines())
    else:
        meta.append(("fit", "skipped, needs 5 positive ok rows"))
    files = {
        f"{sc.name}.sweep.csv": io.csv_text(io.SWEEP_HEADER, columns),
        f"{sc.name}.sweep.sidecar.txt": sc.to_text(meta),
    }
    for path in io.write_all(out, files):
        click.echo(path)


@main.command("spectrum")
@click.option("--eta", type=float, required=True)
@click.option("--omega-c", "omega_c", type=float, required=True)
@click.option("--s", "s", type=float, default=1.0, show_default=True)
@click.option("--Omega", "Omega", type=float, default=0.01, show_default=True)
@_guard
def spectrum_cmd(eta, omega_c, s, Omega):
    """Bound-state regime, thresholds, E_b and Z for both modes."""
    report = analyze(SpectralDensity(eta, omega_c, s), ProbeConfig(Omega=Omega))
    click.echo(io.key_value_text(report_lines(report)), nl=False)


@main.command("kernel-check")
@click.option("--eta", type=float, default=0.05, show_default=True)
@click.option("--omega-c", "omega_c", type=float, default=2.0, show_default=True)
@click.option("--s", "s", type=float, default=1.0, show_default=True)
@click.option("--x-max", type=float, default=50.0, show_default=True)
@click.option("--points", type=click.IntRange(min=2), default=26, show_default=True)
@_guard
def kernel_check_cmd(eta, omega_c, s, x_max, points):
    """Closed-form kernel against oscillatory quadrature; exit 4 above 1e-8."""
    J = SpectralDensity(eta, omega_c, s)
    xs = np.linspace(0.0, x_max, points)
    worst = 0.0
    for x in xs:
        exact = complex(J.kernel(x))
        ref = kernel_by_quadrature(J, x)
        rel = abs(exact - ref) / abs(ref) if ref != 0 else abs(exact)
        worst = max(worst, rel)
        click.echo(f"x = {io.fmt(x)}  closed = {exact:.12e}  quad = {ref:.12e}  rel = {rel:.3e}")
    click.echo(f"max_rel = {io.fmt(worst)}")
    if worst > KERNEL_RTOL:
        click.echo(f"error: kernel mismatch {worst:.3e} exceeds {KERNEL_RTOL:g}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
