from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcwand import ti
from hcwand.model import PeriodicBoundaryLaw


def dense_roots(fn, lo=1e-6, hi=1e4, n=100_001):
    xs = np.logspace(math.log10(lo), math.log10(hi), n)
    v = np.array([fn(x) for x in xs])
    idx = np.nonzero(np.sign(v[1:]) != np.sign(v[:-1]))[0]
    return [(xs[i], xs[i + 1]) for i in idx]


def test_ti_q2_k2_lambda2():
    assert ti.solve_ti_q2(2, 2.0) == pytest.approx(2.0, rel=1e-13)


def test_ti_q2_k3_lambda8_against_scan():
    a = ti.solve_ti_q2(3, 8.0)
    poly = lambda x: 8 * x**4 - 8 * (x + 2) ** 3  # noqa: E731
    (lo, hi), = dense_roots(poly)
    assert lo <= a <= hi
    assert abs(poly(a)) / (8 * (a + 2) ** 3) < 1e-12


def test_ti_q2_vanishes_monotonically_with_lambda():
    vals = [ti.solve_ti_q2(2, lam) for lam in (1e-1, 1e-2, 1e-3)]
    assert vals[0] > vals[1] > vals[2] > 0
    # 2^k a^{k+1} ~ lam 2^k as a -> 0
    assert vals[2] ** 3 / 1e-3 == pytest.approx(1.0, rel=0.2)


@pytest.mark.parametrize(
    "k, lam2, expected",
    [(2, 1.0, 2.0), (3, 0.4, 11.2 / 54), (4, 1.0, 1 / 24)],
)
def test_lambda_cr1_values(k, lam2, expected):
    assert ti.lambda_cr1(k, lam2) == pytest.approx(expected, rel=1e-15)


def test_q4_diagonal():
    assert ti.solve_ti_q4_diagonal(2, 4 / 9, 1.0) == pytest.approx(1.0, rel=1e-13)
    a = ti.solve_ti_q4_diagonal(2, 2.0, 1.0)
    # a = 2 ((2 + a)/(2a))^2  <=>  2 a^3 - (a + 2)^2 = 0
    (lo, hi), = dense_roots(lambda x: 2 * x**3 - (x + 2) ** 2)
    assert lo <= a <= hi
    assert ti.ti_q4_residual(2, 2.0, 1.0, a, a) < 1e-12
    grow = [ti.solve_ti_q4_diagonal(2, lam, 1.0) for lam in (1.0, 10.0, 100.0)]
    assert grow[0] < grow[1] < grow[2]


def test_lambda_of_t_values():
    assert ti.lambda_of_t(1.0, 3, 0.4) == pytest.approx(11.2 / 54, rel=1e-14)
    assert ti.lambda_of_t(2.0, 2, 1.0) == pytest.approx(50 / 18, rel=1e-14)


def lambda_of_t_exact(t: Fraction, k: int, lam2: Fraction) -> Fraction:
    tail = sum(t**i for i in range(1, k))
    full = 1 + tail
    return (lam2 + 1) * (t**k + 1) ** k / (tail * full**k)


@pytest.mark.parametrize("k", range(2, 9))
@pytest.mark.parametrize("lam2", [0.1, 0.4, 1.0, 1.6, 10.0])
def test_curve_bottom_is_critical_value(k, lam2):
    assert ti.lambda_of_t(1.0, k, lam2) == pytest.approx(ti.lambda_cr1(k, lam2), rel=1e-14)
    exact = lambda_of_t_exact(Fraction(1), k, Fraction(lam2))
    assert float(exact) == pytest.approx(ti.lambda_cr1(k, lam2), rel=1e-15)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_curve_symmetry_and_monotonicity(k):
    ts = np.logspace(-3, 3, 601)
    for t in ts:
        assert ti.lambda_of_t(t, k, 0.4) == pytest.approx(ti.lambda_of_t(1 / t, k, 0.4), rel=1e-12)
    upper = np.array([ti.lambda_of_t(t, k, 0.4) for t in ts[ts > 1]])
    assert np.all(np.diff(upper) > 0)


def test_curve_point_solves_the_system():
    for t in (0.3, 1.7, 5.0):
        p = ti.curve_point(t, 3, 0.4)
        assert p.a == pytest.approx(t**3 * p.c, rel=1e-14)
        assert ti.ti_q4_residual(3, p.lam, 0.4, p.a, p.c) < 1e-10 * max(p.a, p.c)


def test_invert_lambda_curve():
    lam = 1.5 * ti.lambda_cr1(2, 1.0)
    t = ti.invert_lambda_curve(lam, 2, 1.0)
    assert t is not None and t > 1
    assert abs(ti.lambda_of_t(t, 2, 1.0) - lam) < 1e-10
    assert ti.invert_lambda_curve(ti.lambda_cr1(3, 0.4), 3, 0.4) is None
    assert ti.invert_lambda_curve(0.5 * ti.lambda_cr1(4, 2.0), 4, 2.0) is None


@pytest.mark.parametrize("lam, count", [(1.0, 1), (2.0, 1), (3.0, 3)])
def test_enumeration_regimes(lam, count):
    sols = ti.enumerate_ti_q4(2, lam, 1.0)
    assert sols.count == count
    assert sols.lambda_cr == 2.0
    assert sols.max_residual < 1e-10
    if count == 3:
        (a1, c1), (a2, c2) = sols.solutions[1:]
        assert a1 > c1
        assert (a2, c2) == (c1, a1)


def test_off_diagonal_pair_merges():
    lcr = ti.lambda_cr1(2, 1.0)
    a_star = ti.solve_ti_q4_diagonal(2, lcr, 1.0)
    gaps = []
    for j in range(1, 7):
        sols = ti.ti_q4_solutions(2, lcr * (1 + 10.0**-j), 1.0)
        assert len(sols) == 3
        gaps.append(abs(sols[1].a - sols[1].c))
        assert sols[1].a == pytest.approx(a_star, rel=10 * 10.0 ** (-j / 2))
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))


@settings(max_examples=40, deadline=None)
@given(
    k=st.integers(2, 5),
    lam=st.floats(1e-2, 1e2),
    lam2=st.floats(0.1, 5.0),
    a=st.floats(0.1, 10.0),
    c=st.floats(0.1, 10.0),
)
def test_swap_symmetry_of_residual(k, lam, lam2, a, c):
    assert ti.ti_q4_residual(k, lam, lam2, a, c) == pytest.approx(ti.ti_q4_residual(k, lam, lam2, c, a), rel=1e-12)


def test_transverse_eigenvalue_crosses_one_at_threshold():
    for k in (2, 3, 4, 5):
        for lam2 in (0.4, 1.0, 1.6):
            lcr = ti.lambda_cr1(k, lam2)
            x0 = ti.solve_ti_q4_diagonal(k, lcr, lam2)
            assert ti.transverse_eigenvalue(k, lam2, x0) == pytest.approx(1.0, rel=1e-12)
            # by finite difference of the map along (1, -1)
            lam = 1.3 * lcr
            x0 = ti.solve_ti_q4_diagonal(k, lam, lam2)
            s = 1 + lam2

            def F(a, c):
                return np.array([lam * ((s + a) / (a + c)) ** k, lam * ((s + c) / (a + c)) ** k])

            h = 1e-6 * x0
            v = (F(x0 + h, x0 - h) - F(x0 - h, x0 + h)) / (2 * h)
            assert v[0] == pytest.approx(ti.transverse_eigenvalue(k, lam2, x0), rel=1e-6)
            assert v[1] == pytest.approx(-v[0], rel=1e-6)


def test_assemble_vectors():
    assert ti.assemble_ti_vector(2.0, 2) == PeriodicBoundaryLaw((1.0, 2.0))
    assert ti.assemble_ti_vector((3.0, 0.5), 4, 1.0).values == (1.0, 3.0, 1.0, 0.5)
    assert ti.assemble_ti_vector((1.5,), 4, 0.7).values == (1.0, 1.5, 0.7, 1.5)
    with pytest.raises(ValueError):
        ti.assemble_ti_vector((1.0, 2.0), 4)
    with pytest.raises(ValueError):
        ti.assemble_ti_vector(1.0, 6, 1.0)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        ti.solve_ti_q2(1, 1.0)
    with pytest.raises(ValueError):
        ti.solve_ti_q2(2, -1.0)
    with pytest.raises(ValueError):
        ti.lambda_of_t(0.0, 2, 1.0)
