import numpy as np
import pytest

from colloc_hum.adjoint1d import (
    AdjointFinalData,
    TimeGrid,
    adjoint_state,
    adjoint_traces,
    energy,
    modal_decompose,
    trace_constants,
)
from colloc_hum.errors import ConfigurationError, InvalidDataError

from conftest import disc


def random_data(basis, rng, decay=1.0):
    k = np.arange(1, basis.count + 1)
    c = rng.standard_normal(basis.count) / k**decay
    d = rng.standard_normal(basis.count) / k**decay
    return AdjointFinalData(c, d, basis)


def test_time_grid():
    g = TimeGrid(4.4, 0.01)
    assert g.n_steps == 440 and g.times[-1] == 4.4 and len(g.times) == 441
    assert g.refined().n_steps == 880
    for bad in ((4.4, 0.03), (0.0, 0.1), (1.0, -0.1), (0.01, 0.01)):
        with pytest.raises(ConfigurationError):
            TimeGrid(*bad)


def test_state_solves_semi_discrete_equation(rng):
    # oracle: centred second difference in time against d2 in space
    d = disc(12)
    data = random_data(d.basis, rng)
    T, t, h = 4.4, 1.3, 1e-3
    phi, _ = adjoint_state(data, [t - h, t, t + h], T)
    phi_tt = (phi[0] - 2 * phi[1] + phi[2]) / h**2
    lap = d.diff.d2 @ phi[1]
    scale = np.abs(lap).max()
    assert np.max(np.abs(phi_tt[1:-1] - lap[1:-1])) < 1e-4 * scale


def test_final_data_recovered(rng):
    d = disc(15)
    data = random_data(d.basis, rng)
    phi, phi_t = adjoint_state(data, [4.4], 4.4)
    p0, p1 = data.nodes()
    assert np.allclose(phi[0], p0) and np.allclose(phi_t[0], p1)
    back = modal_decompose(p0, p1, d.basis)
    assert np.allclose(back.c, data.c) and np.allclose(back.d, data.d)


def test_modal_decompose_rejects_boundary_values():
    b = disc(6).basis
    v = np.ones(7)
    with pytest.raises(InvalidDataError):
        modal_decompose(v, np.zeros(7), b)
    with pytest.raises(InvalidDataError):
        modal_decompose(np.zeros(5), np.zeros(7), b)


def test_energy_conserved(rng):
    for n in (10, 40):
        data = random_data(disc(n).basis, rng)
        e = [energy(data, t, 4.4) for t in np.linspace(0, 4.4, 9)]
        assert np.ptp(e) / e[0] < 1e-10


def test_traces_match_nodal_derivatives(rng):
    d = disc(14)
    data = random_data(d.basis, rng)
    grid = TimeGrid(1.0, 0.1)
    tr = adjoint_traces(data, grid)
    phi, _ = adjoint_state(data, grid.times, 1.0)
    px = phi @ d.diff.d1.T
    pxx = phi @ d.diff.d2.T
    w = d.rule.weights
    assert np.allclose(tr.psi_f, px[:, -1] - w[-1] * pxx[:, -1])
    assert np.allclose(tr.psi_r, np.sqrt(w[-1]) * pxx[:, -1])
    assert np.allclose(tr.psi_l, np.sqrt(w[0]) * pxx[:, 0])


def test_trace_constants_low_modes_approach_continuum():
    # phi_k = sin(k pi (x+1)/2): phi_x(1) = (k pi/2) cos(k pi), phi_xx(+-1) = 0
    b = disc(40).basis
    a, r, l = trace_constants(b)
    k = np.arange(1, 4)
    assert np.allclose(a[:3], k * np.pi / 2 * (-1.0) ** k, atol=1e-8)
    assert np.max(np.abs(r[:3])) < 1e-8 and np.max(np.abs(l[:3])) < 1e-8
