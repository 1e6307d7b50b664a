import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import legendre as L
from numpy.polynomial import polynomial as P

from colloc_hum.errors import DomainError, InvalidOrderError
from colloc_hum.quadrature import (
    diff_matrices,
    discrete_inner,
    discrete_norm,
    interpolate,
    l2_inner_exact,
    lagrange_eval,
    legendre_and_derivative,
    lgl_rule,
)


def exact_integral(coef):
    prim = P.polyint(coef)
    return P.polyval(1.0, prim) - P.polyval(-1.0, prim)


def test_nodes_are_roots_of_legendre_derivative():
    # oracle: numpy's Legendre-series root finder
    for n in (4, 9, 20):
        rule = lgl_rule(n)
        ref = np.sort(L.legroots(L.legder([0] * n + [1])))
        assert np.allclose(rule.nodes[1:-1], ref, atol=1e-12)
        assert rule.nodes[0] == -1.0 and rule.nodes[-1] == 1.0


def test_weights_known_small_cases():
    # N = 2 is Simpson's rule, N = 3 has nodes +-1/sqrt(5)
    assert np.allclose(lgl_rule(2).weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)
    r3 = lgl_rule(3)
    assert np.allclose(r3.nodes, [-1, -1 / np.sqrt(5), 1 / np.sqrt(5), 1], atol=1e-15)
    assert np.allclose(r3.weights, [1 / 6, 5 / 6, 5 / 6, 1 / 6], atol=1e-15)


@pytest.mark.parametrize("n", [2, 7, 20, 64])
def test_weights_positive_symmetric_sum_two(n):
    w = lgl_rule(n).weights
    assert np.all(w > 0)
    assert np.allclose(w, w[::-1], rtol=0, atol=1e-15)
    assert abs(w.sum() - 2.0) < 1e-13
    assert abs(w[-1] - 2.0 / (n * (n + 1))) < 1e-15


@given(n=st.integers(2, 40), seed=st.integers(0, 2**31))
def test_exact_to_degree_2n_minus_1(n, seed):
    rng = np.random.default_rng(seed)
    rule = lgl_rule(n)
    da = int(rng.integers(0, n + 1))
    db = 2 * n - 1 - da
    a, b = rng.standard_normal(da + 1), rng.standard_normal(db + 1)
    got = discrete_inner(P.polyval(rule.nodes, a), P.polyval(rule.nodes, b), rule)
    want = exact_integral(P.polymul(a, b))
    assert abs(got - want) <= 1e-12 * max(1.0, np.abs(a).sum() * np.abs(b).sum())


def test_degree_2n_is_not_exact():
    n = 6
    rule = lgl_rule(n)
    x = rule.nodes
    # L_N^2 has degree 2N; the LGL rule misses its integral 2/(2N+1)
    p, _ = legendre_and_derivative(n, x)
    assert abs(discrete_inner(p, p, rule) - 2.0 / (2 * n + 1)) > 1e-3


def test_norm_equivalence_bound():
    # ||v||_L2 <= ||v||_N <= sqrt(2 + 1/N) ||v||_L2 on P_N
    rng = np.random.default_rng(0)
    for n in (5, 16, 33):
        rule = lgl_rule(n)
        for _ in range(20):
            v = rng.standard_normal(n + 1)
            l2 = np.sqrt(l2_inner_exact(rule, v, v))
            dn = discrete_norm(v, rule)
            assert l2 <= dn * (1 + 1e-12)
            assert dn <= np.sqrt(2 + 1.0 / n) * l2 * (1 + 1e-12)


@pytest.mark.parametrize("n", [4, 12, 30])
def test_differentiation_exact_on_polynomials(n):
    rule = lgl_rule(n)
    dm = diff_matrices(rule)
    rng = np.random.default_rng(n)
    c = rng.standard_normal(n + 1)
    x = rule.nodes
    scale = np.abs(c).sum() * n**4
    assert np.max(np.abs(dm.d1 @ P.polyval(x, c) - P.polyval(x, P.polyder(c)))) < 1e-13 * scale
    assert np.max(np.abs(dm.d2 @ P.polyval(x, c) - P.polyval(x, P.polyder(c, 2)))) < 1e-13 * scale
    assert np.allclose(dm.d1.sum(axis=1), 0.0, atol=1e-12 * n * n)


def test_d1_end_entry():
    # classical value D[0,0] = -N(N+1)/4
    for n in (3, 10, 25):
        d = diff_matrices(lgl_rule(n)).d1
        assert abs(d[0, 0] + n * (n + 1) / 4) < 1e-11 * n * n
        assert abs(d[n, n] - n * (n + 1) / 4) < 1e-11 * n * n


@given(n=st.integers(2, 30), seed=st.integers(0, 2**31))
def test_interpolation_reproduces_polynomials(n, seed):
    rng = np.random.default_rng(seed)
    rule = lgl_rule(n)
    c = rng.standard_normal(n + 1)
    x = rng.uniform(-1, 1, 17)
    got = interpolate(rule, P.polyval(rule.nodes, c), x)
    assert np.allclose(got, P.polyval(x, c), atol=1e-11 * np.abs(c).sum())


def test_lagrange_cardinality():
    rule = lgl_rule(8)
    for j in range(9):
        vals = np.array([lagrange_eval(rule, j, float(x)) for x in rule.nodes])
        assert np.array_equal(vals, np.eye(9)[j])


def test_errors():
    with pytest.raises(InvalidOrderError):
        lgl_rule(1)
    with pytest.raises(InvalidOrderError):
        lgl_rule(3.5)
    rule = lgl_rule(4)
    with pytest.raises(DomainError):
        interpolate(rule, np.zeros(5), [1.5])
    with pytest.raises(DomainError):
        lagrange_eval(rule, 7, 0.0)


def test_large_order_residual():
    n = 512
    rule = lgl_rule(n)
    _, dp = legendre_and_derivative(n, rule.nodes[1:-1])
    assert np.max(np.abs(dp)) < 1e-9 * n * (n + 1) / 2
