"""Control norms against the cutoff width delta, 1-d Gaussian and 2-d data.

The cutoff width is a free parameter.  This sweep is the evidence behind
the default delta = min(T/10, (T-4)/4): with T = 4.4 the plateau of eta must
stay at least 4 long or the 1-d problem loses observability.
"""

import logging

import numpy as np

from colloc_hum import TimeGrid, WeightFunction, build_discretization, solve_hum
from colloc_hum.control2d import SIDES, make_grid, solve_hum_2d, tensor_basis
from colloc_hum.errors import NonConvergenceError
from colloc_hum.initial_data import builtin_1d, builtin_2d

logging.getLogger("colloc_hum").setLevel(logging.ERROR)
T = 4.4


def one_d(n, delta):
    d = build_discretization(n)
    data = builtin_1d("gaussian-bump", d.rule)
    try:
        sol = solve_hum(data, d.basis, d.shapes, WeightFunction(T, delta), TimeGrid(T, 0.01),
                        max_iter=20000)
    except NonConvergenceError:
        return np.nan, np.nan
    nf, ngr, ngl = sol.controls.l2_norms()
    return nf, max(ngr, ngl)


def two_d(n, delta):
    g = make_grid(n, n)
    b = tensor_basis(g.dir1.basis, g.dir2.basis)
    data = builtin_2d("gaussian-2d", g.dir1.rule, g.dir2.rule)
    sol = solve_hum_2d(data, g, b, WeightFunction(T, delta), TimeGrid(T, 0.01), max_iter=20000)
    return sol.controls.norm_f(), max(sol.controls.norm_g(s) for s in SIDES)


if __name__ == "__main__":
    print("delta   |f| N=20  |g| N=20  |f| N=100  |g| N=100 | 2-d |f| (20,20)  |g|")
    for delta in (0.05, 0.1, 0.15, 0.2, 0.3, 0.44):
        f20, g20 = one_d(20, delta)
        f100, g100 = one_d(100, delta)
        f2, g2 = two_d(20, delta)
        print(f"{delta:5.2f}  {f20:8.4f}  {g20:8.1e}  {f100:9.4f}  {g100:9.1e} | {f2:15.4f}  {g2:.1e}")
