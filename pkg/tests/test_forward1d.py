import numpy as np
import pytest
from scipy.integrate import solve_ivp

from colloc_hum.adjoint1d import TimeGrid
from colloc_hum.cutoff import WeightFunction
from colloc_hum.errors import DimensionError
from colloc_hum.forward1d import (
    ForwardState,
    final_residual,
    forward_energy,
    forward_solve,
    oscillator_panels,
    trapezoidal_reference,
)
from colloc_hum.hum1d import ControlSet, extract_controls, solve_hum
from colloc_hum.initial_data import builtin_1d

from conftest import disc

T = 4.4
W = WeightFunction(T, 0.1)


def test_oscillator_against_ode_solver():
    omega = np.array([0.7, 3.0, 11.0])
    dt = 0.05
    times = np.arange(0, 41) * dt
    forcing = np.stack([np.sin(1.3 * times), times**2, np.cos(5 * times)], axis=1)

    def rhs(t, y):
        n = min(int(t / dt), 39)
        th = (t - n * dt) / dt
        f = (1 - th) * forcing[n] + th * forcing[n + 1]
        return np.concatenate([y[3:], f - omega**2 * y[:3]])

    q0, p0 = np.array([1.0, 0.0, -0.5]), np.array([0.0, 2.0, 1.0])
    ref = solve_ivp(rhs, (0, times[-1]), np.concatenate([q0, p0]), rtol=1e-12, atol=1e-12,
                    max_step=dt / 4)
    q, p = oscillator_panels(q0, p0, omega, forcing, dt)
    assert np.allclose(q, ref.y[:3, -1], atol=1e-8)
    assert np.allclose(p, ref.y[3:, -1], atol=1e-8)


def test_modal_solve_matches_trapezoidal_reference():
    n = 8
    d = disc(n)
    data = builtin_1d("gaussian-bump", d.rule)
    grid = TimeGrid(T, 0.05)
    sol = solve_hum(data, d.basis, d.shapes, W, grid)
    a = forward_solve(data, sol.controls, d.basis, d.shapes, d.laplacian, grid)
    b = trapezoidal_reference(data, sol.controls, d.basis, d.shapes, d.laplacian, grid, substeps=16)
    scale = np.abs(data[0]).max()
    assert np.max(np.abs(a.u - b.u)) < 1e-7 * scale
    assert np.max(np.abs(a.v - b.v)) < 1e-6 * scale


def test_homogeneous_energy_conserved():
    n = 50
    d = disc(n)
    data = builtin_1d("gaussian-bump", d.rule)
    e0 = forward_energy(ForwardState(data[0], data[1][1:-1], 0.0), d.rule, d.diff.d1)
    energies = []
    for t_end in (0.5, 2.2, 4.4):
        g = TimeGrid(t_end, t_end / 10)
        st = forward_solve(data, ControlSet.zeros(g), d.basis, d.shapes, d.laplacian, g)
        energies.append(forward_energy(st, d.rule, d.diff.d1))
    assert max(abs(e - e0) for e in energies) < 1e-9 * e0


def test_uncontrolled_residual_order_one():
    d = disc(20)
    data = builtin_1d("gaussian-bump", d.rule)
    grid = TimeGrid(T, 0.01)
    st = forward_solve(data, ControlSet.zeros(grid), d.basis, d.shapes, d.laplacian, grid)
    assert final_residual(st, d.rule, data) > 0.1


def test_zero_everything():
    d = disc(10)
    z = np.zeros(11)
    grid = TimeGrid(1.0, 0.1)
    st = forward_solve((z, z), ControlSet.zeros(grid), d.basis, d.shapes, d.laplacian, grid)
    assert final_residual(st, d.rule, (z, z)) == 0.0


def test_dt_halving_second_order():
    n = 20
    d = disc(n)
    data = builtin_1d("gaussian-bump", d.rule)
    sol = solve_hum(data, d.basis, d.shapes, W, TimeGrid(T, 0.01))
    res = []
    for dt in (0.01, 0.005, 0.0025):
        g = TimeGrid(T, dt)
        c = extract_controls(sol.minimizer, W, g)
        res.append(final_residual(forward_solve(data, c, d.basis, d.shapes, d.laplacian, g), d.rule, data))
    ratios = np.array(res[:-1]) / np.array(res[1:])
    assert np.all((ratios > 3.5) & (ratios < 4.5))


def test_dimension_checks():
    d = disc(10)
    z = np.zeros(11)
    grid = TimeGrid(1.0, 0.1)
    with pytest.raises(DimensionError):
        forward_solve((z[:5], z), ControlSet.zeros(grid), d.basis, d.shapes, d.laplacian, grid)
    with pytest.raises(DimensionError):
        forward_solve((z, z), ControlSet.zeros(TimeGrid(1.0, 0.05)), d.basis, d.shapes, d.laplacian, grid)
