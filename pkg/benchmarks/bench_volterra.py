"""Compiled against pure-Python leaf stepper.

    python benchmarks/bench_volterra.py [--repeat 3]

Times one mode of the Volterra solve (eta = 0.05, omega_c = 25) for a few
horizons with each available backend and checks that the amplitudes agree.
"""

import argparse
import timeit

import numpy as np

from qogyro import _backend
from qogyro.spectral import SpectralDensity
from qogyro.volterra import KernelTable, TimeGrid, solve_mode

HORIZONS = (10.0, 50.0, 200.0)
DT = 0.0008


def bench(repeat):
    J = SpectralDensity(0.05, 25.0, 1.0)
    names = sorted(_backend.BACKENDS)
    print(f"backends: {', '.join(names)} (default {_backend.NAME})")
    print(f"{'t_max':>8} {'steps':>8} " + " ".join(f"{n:>10}" for n in names) + f" {'speedup':>8} {'max diff':>9}")
    for t_max in HORIZONS:
        grid = TimeGrid(t_max, DT)
        table = KernelTable(J, grid.dt, grid.n_steps)
        table.product_weights(1.01)  # fill the node cache outside the timing
        times, out = {}, {}
        for name in names:
            step = _backend.BACKENDS[name]
            run = lambda: solve_mode(J, 1.01, grid, table, step)
            out[name] = run()[0]
            times[name] = min(timeit.repeat(run, number=1, repeat=repeat))
        diff = max(np.max(np.abs(out[n] - out[names[0]])) for n in names)
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        cells = " ".join(f"{times[n]:>9.3f}s" for n in names)
        print(f"{t_max:>8g} {grid.n_steps:>8d} {cells} {speed:>7.1f}x {diff:>9.1e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    bench(parser.parse_args().repeat)


if __name__ == "__main__":
    main()
