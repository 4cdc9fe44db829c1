import math

import numpy as np
import pytest

from curvlab.errors import OutOfRange, WrongKind
from curvlab.numerics import differentiate
from curvlab.potential import (
    SolutionKind,
    capacity,
    default_t_grid,
    grad_value,
    level,
    level_integrals,
    level_value,
    solve,
    t_of_level,
    u_value,
    volume_to_coordinate,
)
from curvlab.profile import MetricProfile, ProfileKind

FOUR_PI = 4.0 * math.pi


class TestEuclidean:
    def test_u_closed_form_pointwise(self, euclid_sol):
        # u(s) = 1 - 1/s to rel 1e-12
        for s in (0.2, 0.5, 1.0, 3.0, 42.0, 1000.0):
            assert u_value(euclid_sol, s) == pytest.approx(1.0 - 1.0 / s, abs=1e-12)

    def test_grad_is_inverse_square(self, euclid_sol):
        for s in (0.5, 2.0, 10.0):
            assert grad_value(euclid_sol, s) == pytest.approx(s**-2, rel=1e-15)

    def test_level_t2(self, euclid_sol):
        lp = level(euclid_sol, 2.0)
        assert lp.s == pytest.approx(2.0, rel=1e-12)
        assert lp.u == pytest.approx(0.5, abs=1e-15)

    def test_level_integrals_t3(self, euclid_sol, golden):
        ls = level_integrals(euclid_sol, 3.0)
        assert ls.int_grad == pytest.approx(golden["potential.euclid_t3_int_grad"], rel=1e-12)
        assert ls.int_grad_sq == pytest.approx(golden["potential.euclid_t3_int_grad_sq"], rel=1e-10)
        assert ls.area == pytest.approx(golden["potential.euclid_t3_area"], rel=1e-10)


class TestSchwarzschild:
    def test_u_closed_form(self, schw1_sol):
        for r in (0.5, 0.8, 1.0, 2.5, 30.0):
            exact = (1.0 - 0.5 / r) / (1.0 + 0.5 / r)
            assert u_value(schw1_sol, r) == pytest.approx(exact, abs=1e-12)

    def test_capacity_equals_mass(self, schw1_sol, schw2_sol, golden):
        assert capacity(schw1_sol) == pytest.approx(golden["potential.schw1_capacity"], rel=1e-10)
        assert capacity(schw2_sol) == pytest.approx(golden["potential.schw2_capacity"], rel=1e-10)

    def test_boundary_level(self, schw1_sol):
        # dM = {u = 0} at t = C/2, by the maximum principle.
        lp = level(schw1_sol, 0.5)
        assert lp.s == schw1_sol.profile.x_min
        assert lp.u == 0.0

    def test_level_t1_is_unit_radius(self, schw1_sol, golden):
        lp = level(schw1_sol, 1.0)
        assert lp.s == pytest.approx(1.0, rel=1e-12)
        assert lp.u == pytest.approx(golden["potential.schw1_u_at_1"], abs=1e-14)

    def test_boundary_gradient_integral_is_pi(self, schw1_sol, golden):
        ls = level_integrals(schw1_sol, 0.5)
        assert ls.int_grad_sq == pytest.approx(golden["potential.schw1_boundary_int_grad_sq"], rel=1e-12)
        assert ls.int_grad_sq == pytest.approx(math.pi, rel=1e-12)

    def test_flux_constancy_100_points(self, schw1_sol):
        target = FOUR_PI * schw1_sol.capacity
        for t in np.geomspace(0.5, 1000.0, 100):
            flux = level_integrals(schw1_sol, float(t)).int_grad
            assert abs(flux - target) <= 1e-9 * target

    def test_harmonicity_residual(self, schw1_sol):
        # (f^2 u')' = 0: f^2 |grad u| must be the constant c everywhere.
        p = schw1_sol.profile
        phi = lambda x: p.f(x) ** 2 * grad_value(schw1_sol, x)
        for x in (0.6, 1.7, 12.0, 300.0):
            residual = differentiate(phi, x) / p.ds_dx(x)
            assert abs(residual) <= 1e-9

    def test_u_grad_consistency(self, schw1_sol):
        # numerical du/ds against the analytic |grad u|
        p = schw1_sol.profile
        for x in (0.7, 2.0, 9.0):
            du_dx = differentiate(lambda y: u_value(schw1_sol, y), x)
            assert du_dx / p.ds_dx(x) == pytest.approx(grad_value(schw1_sol, x), rel=1e-6)


class TestLevels:
    def test_round_trip_rel_1e10(self, schw1_sol):
        for t in np.geomspace(0.5, 1000.0, 60):
            lp = level(schw1_sol, float(t))
            back = t_of_level(schw1_sol, u_value(schw1_sol, lp.s))
            assert back == pytest.approx(float(t), rel=1e-10)

    def test_t_to_s_strictly_increasing(self, moll11_sol):
        ss = [level(moll11_sol, float(t)).s for t in np.geomspace(0.3, 500.0, 40)]
        assert all(b > a for a, b in zip(ss, ss[1:]))

    def test_level_formula_matches(self, schw1_sol):
        cap = schw1_sol.capacity
        for t in (0.5, 1.0, 10.0):
            expected = (1.0 - cap / (2 * t)) / (1.0 + cap / (2 * t))
            assert level_value(schw1_sol, t) == pytest.approx(expected, abs=1e-15)

    def test_out_of_range(self, schw1_sol, euclid_sol):
        with pytest.raises(OutOfRange):
            level(schw1_sol, 0.4)
        with pytest.raises(OutOfRange):
            level(euclid_sol, 0.0)

    def test_wrong_kind(self, euclid_sol):
        with pytest.raises(WrongKind):
            capacity(euclid_sol)


class TestMollified:
    def test_exterior_u_closed_form(self, moll11_sol, golden):
        assert u_value(moll11_sol, 2.0) == pytest.approx(golden["potential.moll11_u_at_2"], abs=1e-12)
        assert u_value(moll11_sol, 5.0) == pytest.approx(golden["potential.moll11_u_at_5"], abs=1e-12)

    def test_kind_and_flux(self, moll11_sol):
        assert moll11_sol.kind is SolutionKind.GREEN_BOUNDARYLESS
        assert moll11_sol.c_norm == 1.0
        for t in (0.5, 3.0, 100.0):
            assert level_integrals(moll11_sol, t).int_grad == pytest.approx(FOUR_PI, rel=1e-12)

    def test_grad_vanishes_flag(self, moll11_sol, schw1_sol):
        assert moll11_sol.grad_vanishes_at_infinity
        assert schw1_sol.grad_vanishes_at_infinity


class TestCapacityExamples:
    def test_flat_exterior_unit_sphere(self, golden):
        # Boundary unit sphere in flat space: Newtonian capacity 1 (boundary
        # not minimal; used for capacity arithmetic only).
        p = MetricProfile(
            label="flat-exterior",
            kind=ProfileKind.WITH_BOUNDARY,
            x_min=0.0,
            f=lambda x: x + 1.0,
            df_ds=lambda x: 1.0,
            d2f_ds2=lambda x: 0.0,
        )
        sol = solve(p)
        assert capacity(sol) == pytest.approx(golden["potential.flat_exterior_capacity"], rel=1e-10)


def test_volume_euclid_ball(euclid_sol, golden):
    x = level(euclid_sol, 2.0).s
    assert volume_to_coordinate(euclid_sol, x) == pytest.approx(
        golden["functionals.euclid_volume_t2"], rel=1e-10
    )


def test_default_grid_shape(schw1_sol):
    grid = default_t_grid(schw1_sol)
    assert len(grid) == 256
    assert grid[0] == pytest.approx(0.5 * schw1_sol.capacity, rel=1e-12)
    assert grid[-1] == pytest.approx(1000.0 * schw1_sol.capacity, rel=1e-12)
