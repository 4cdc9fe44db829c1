import math

import pytest

from curvlab.errors import DomainEdge, NoBracket, NonConvergent, ReducedOrderWarning
from curvlab.numerics import (
    DEFAULT_TOLERANCE,
    QuadratureResult,
    Tolerance,
    differentiate,
    extrapolate_to_zero,
    find_root,
    integrate,
)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel=-1.0)
    with pytest.raises(ValueError):
        Tolerance(rel=0.0, abs=0.0)
    with pytest.raises(ValueError):
        Tolerance(max_refinements=0)


def test_integrate_inverse_square_tail():
    res = integrate(lambda s: s**-2, 1.0, math.inf)
    assert abs(res.value - 1.0) <= 1e-10
    assert res.error_estimate <= max(DEFAULT_TOLERANCE.rel * abs(res.value), DEFAULT_TOLERANCE.abs)
    assert res.evaluations > 0


def test_integrate_constant():
    res = integrate(lambda s: 1.0, 0.0, 2.0)
    assert abs(res.value - 2.0) <= 1e-12


def test_integrate_schwarzschild_potential_integrand(golden):
    res = integrate(lambda r: 1.0 / (r + 0.5) ** 2, 1.0, math.inf)
    assert abs(res.value - golden["numerics.schw_exterior_integral"]) <= 1e-12


def test_integrate_divergent_tail_raises():
    with pytest.raises(NonConvergent):
        integrate(lambda s: 1.0 / s, 1.0, math.inf)


def test_integrate_respects_breakpoints():
    # C^0 kink; giving the breakpoint keeps the budget small.
    f = lambda s: abs(s - 0.3)
    res = integrate(f, 0.0, 1.0, points=(0.3,))
    assert abs(res.value - (0.3**2 / 2 + 0.7**2 / 2)) <= 1e-12


def test_integrate_reversed_limits():
    res = integrate(lambda s: s, 2.0, 0.0)
    assert abs(res.value + 2.0) <= 1e-12


def test_differentiate_square():
    assert differentiate(lambda t: t * t, 1.0) == pytest.approx(2.0, abs=1e-9)


def test_differentiate_reciprocal():
    assert differentiate(lambda t: 1.0 / t, 2.0) == pytest.approx(-0.25, abs=1e-9)


def test_differentiate_schwarzschild_g_vanishes(schw1_sol):
    # G is identically zero on Schwarzschild, so its derivative must be too.
    from curvlab.functionals import g_func

    assert differentiate(lambda t: g_func(schw1_sol, t), 1.0) == pytest.approx(0.0, abs=1e-6)


def test_differentiate_one_sided_warns():
    with pytest.warns(ReducedOrderWarning):
        d = differentiate(lambda t: t * t, 0.0, scale=1e-4, lo=0.0)
    assert d == pytest.approx(0.0, abs=1e-6)


def test_differentiate_no_room_raises():
    with pytest.raises(DomainEdge):
        differentiate(lambda t: t, 0.0, scale=1.0, lo=-0.5, hi=0.5)


def test_find_root_euclid_level():
    root = find_root(lambda s: 1.0 - 1.0 / s - 0.5, 1.0, 10.0)
    assert root == pytest.approx(2.0, rel=1e-9)


def test_find_root_cube():
    assert find_root(lambda x: x**3 - 8.0, 0.0, 4.0) == pytest.approx(2.0, rel=1e-12)


def test_find_root_schwarzschild_level(golden):
    u = lambda r: (1.0 - 0.5 / r) / (1.0 + 0.5 / r) - 1.0 / 3.0
    root = find_root(u, 0.6, 10.0, Tolerance(rel=1e-14, abs=1e-14))
    assert root == pytest.approx(golden["numerics.schw_root_of_u_third"], rel=1e-10)


def test_find_root_requires_bracket():
    with pytest.raises(NoBracket):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_extrapolate_to_zero_exact_on_cubic():
    xs = [0.2, 0.1, 0.05, 0.025, 0.0125]
    poly = lambda x: 3.0 - 2.0 * x + 0.5 * x**2 - x**3
    assert extrapolate_to_zero(xs, [poly(x) for x in xs]) == pytest.approx(3.0, abs=1e-12)


def test_extrapolate_validation():
    with pytest.raises(ValueError):
        extrapolate_to_zero([], [])
    with pytest.raises(ValueError):
        extrapolate_to_zero([0.1, 0.1], [1.0, 2.0])


def test_quadrature_result_fields():
    res = integrate(lambda s: math.exp(-s), 0.0, math.inf)
    assert isinstance(res, QuadratureResult)
    assert abs(res.value - 1.0) <= 1e-10
    assert res.error_estimate >= 0.0
