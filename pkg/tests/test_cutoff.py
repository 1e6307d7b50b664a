import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from colloc_hum.cutoff import WeightFunction, default_delta, pair_integrals, smoothstep_coefficients
from colloc_hum.errors import ConfigurationError, DomainError
from numpy.polynomial import polynomial as P


def test_smoothstep_order2_is_quintic():
    assert np.allclose(smoothstep_coefficients(2), [0, 0, 0, 10, -15, 6])


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_smoothstep_flat_ends(p):
    c = smoothstep_coefficients(p)
    assert abs(P.polyval(0.0, c)) < 1e-14 and abs(P.polyval(1.0, c) - 1) < 1e-16 * np.abs(c).sum()
    for m in range(1, p + 1):
        d = P.polyder(c, m)
        scale = np.abs(d).sum()
        assert abs(P.polyval(0.0, d)) < 1e-13 * scale and abs(P.polyval(1.0, d)) < 1e-13 * scale


def test_eta_support_and_plateau():
    w = WeightFunction(4.4, 0.1)
    t = np.linspace(0, 4.4, 4401)
    e = w(t)
    assert np.all((e >= 0) & (e <= 1))
    # grid points at t = T - delta may land a rounding error inside the band
    assert np.max(e[(t <= 0.1) | (t >= 4.3)]) < 1e-30
    assert np.all(e[(t >= 0.2) & (t <= 4.2)] == 1.0)
    assert np.allclose(e, e[::-1], atol=1e-14)


def test_eta_errors():
    with pytest.raises(ConfigurationError):
        WeightFunction(4.4, 1.2)
    with pytest.raises(ConfigurationError):
        WeightFunction(4.4, 0.0)
    with pytest.raises(DomainError):
        WeightFunction(4.4, 0.1)(5.0)


def test_integral_closed_form():
    w = WeightFunction(4.4, 0.3)
    val, _ = quad(w, 0, 4.4, points=[0.3, 0.6, 3.8, 4.1], limit=200)
    assert abs(val - w.integral()) < 1e-12


@pytest.mark.parametrize("order", [2, 4])
@pytest.mark.parametrize("nu", [0.0, 0.7, 3.1, 29.9, 30.1, 157.0, 2500.0])
def test_fourier_against_quadrature(order, nu):
    w = WeightFunction(4.4, 0.2, order)
    T = w.t_final
    c, s = w.fourier(np.array([nu]))
    brk = [0.2, 0.4, 4.0, 4.2]
    lim = 2000
    rc = quad(lambda t: w(t) * np.cos(nu * (t - T)), 0, T, points=brk, limit=lim)[0]
    rs = quad(lambda t: w(t) * np.sin(nu * (t - T)), 0, T, points=brk, limit=lim)[0]
    assert abs(c[0] - rc) < 1e-10 and abs(s[0] - rs) < 1e-10


@given(a=st.floats(0.1, 80), b=st.floats(0.1, 80))
def test_pair_integrals_against_quadrature(a, b):
    w = WeightFunction(4.4, 0.25)
    T = w.t_final
    cc, cs, ss = pair_integrals([a], [b], w)
    brk = [0.25, 0.5, 3.9, 4.15]
    f = lambda g, h: quad(lambda t: w(t) * g(t - T) * h(t - T), 0, T, points=brk, limit=2000)[0]
    ca, sa = (lambda s: np.cos(a * s)), (lambda s: np.sin(a * s))
    cb, sb = (lambda s: np.cos(b * s)), (lambda s: np.sin(b * s))
    assert abs(cc[0, 0] - f(ca, cb)) < 1e-9
    assert abs(cs[0, 0] - f(ca, sb)) < 1e-9
    assert abs(ss[0, 0] - f(sa, sb)) < 1e-9


def test_default_delta():
    assert abs(default_delta(4.4) - 0.1) < 1e-12
    assert default_delta(10.0) == 1.0
    assert default_delta(3.0) == pytest.approx(0.3)
