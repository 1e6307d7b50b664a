"""Forward-verification residual against dt for fixed HUM minimisers.

Controls are resampled from the exact modal traces on each grid, so the
residual isolates the piecewise-linear forcing interpolation error.
"""

import logging

from colloc_hum import TimeGrid, WeightFunction, build_discretization, default_delta, solve_hum
from colloc_hum.forward1d import final_residual, forward_solve
from colloc_hum.hum1d import extract_controls
from colloc_hum.initial_data import builtin_1d

logging.getLogger("colloc_hum").setLevel(logging.ERROR)
T = 4.4

if __name__ == "__main__":
    w = WeightFunction(T, default_delta(T))
    dts = (0.01, 0.005, 0.0025, 0.00125)
    print("N    " + "  ".join(f"dt={dt:<8g}" for dt in dts))
    for n in (10, 20, 50, 100):
        d = build_discretization(n)
        data = builtin_1d("gaussian-bump", d.rule)
        sol = solve_hum(data, d.basis, d.shapes, w, TimeGrid(T, 0.01))
        res = []
        for dt in dts:
            g = TimeGrid(T, dt)
            c = extract_controls(sol.minimizer, w, g)
            res.append(final_residual(forward_solve(data, c, d.basis, d.shapes, d.laplacian, g), d.rule, data))
        print(f"{n:<4d} " + "  ".join(f"{r:11.3e}" for r in res))
