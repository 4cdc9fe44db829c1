"""Property-based checks of the numerics kernel and the level machinery."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab.numerics import Tolerance, differentiate, find_root, integrate
from curvlab.potential import level, t_of_level, u_value

_EPS = 2.220446049250313e-16

coeffs = st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=5)


def _smooth(cs):
    def f(x):
        return sum(c * x**k for k, c in enumerate(cs)) + 0.5 * math.sin(x)

    return f


@given(cs=coeffs, a=st.floats(-4.0, 0.0), gap1=st.floats(0.3, 3.0), gap2=st.floats(0.3, 3.0))
@settings(max_examples=60, deadline=None)
def test_integrate_additive(cs, a, gap1, gap2):
    f = _smooth(cs)
    c = a + gap1
    b = c + gap2
    left = integrate(f, a, c)
    right = integrate(f, c, b)
    whole = integrate(f, a, b)
    budget = left.error_estimate + right.error_estimate + whole.error_estimate
    assert abs(left.value + right.value - whole.value) <= budget + 1e-12 * (1 + abs(whole.value))


@given(cs=st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=4), half=st.floats(0.1, 5.0))
@settings(max_examples=60, deadline=None)
def test_integrate_odd_function_vanishes(cs, half):
    def f(x):
        return sum(c * x ** (2 * k + 1) for k, c in enumerate(cs)) + math.sin(x)

    res = integrate(f, -half, half)
    assert abs(res.value) <= max(res.error_estimate, 1e-11)


@given(
    slope=st.floats(0.1, 10.0),
    cubic=st.floats(0.0, 10.0),
    root=st.floats(-5.0, 5.0),
    span=st.floats(0.5, 4.0),
)
@settings(max_examples=80, deadline=None)
def test_find_root_monotone(slope, cubic, root, span):
    f = lambda x: cubic * (x - root) ** 3 + slope * (x - root)
    x = find_root(f, root - span, root + 1.3 * span, Tolerance(rel=1e-15, abs=1e-9))
    assert abs(f(x)) <= 1e-9


@given(
    cs=st.lists(st.floats(-5.0, 5.0), min_size=5, max_size=5),
    t=st.floats(-3.0, 3.0),
)
@settings(max_examples=80, deadline=None)
def test_differentiate_exact_on_quartics(cs, t):
    poly = np.polynomial.Polynomial(cs)
    exact = poly.deriv()(t)
    h = 1e-4 * max(1.0, abs(t))
    got = differentiate(lambda x: float(poly(x)), t)
    # Exact up to rounding: one Richardson step kills every truncation term
    # of a degree-4 polynomial.  The rounding scale is the coefficient
    # magnitude (terms can be large even where the polynomial vanishes).
    term_mag = sum(abs(c) * max(1.0, abs(t) + h) ** k for k, c in enumerate(cs))
    bound = 10.0 * _EPS * (term_mag / h + abs(exact) + 1.0)
    assert abs(got - exact) <= bound


@given(t=st.floats(0.51, 990.0))
@settings(max_examples=40, deadline=None)
def test_level_round_trip(schw1_sol, t):
    lp = level(schw1_sol, t)
    back = t_of_level(schw1_sol, u_value(schw1_sol, lp.s))
    assert back == pytest.approx(t, rel=1e-10)


@given(t1=st.floats(0.5, 900.0), t2=st.floats(0.5, 900.0))
@settings(max_examples=40, deadline=None)
def test_level_map_monotone(schw1_sol, t1, t2):
    if abs(t1 - t2) < 1e-9:
        return
    lo, hi = sorted((t1, t2))
    assert level(schw1_sol, lo).s <= level(schw1_sol, hi).s
