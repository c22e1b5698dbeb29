import numpy as np
import pytest

from maxplus_lab.function_space import Grid, GridFunction
from maxplus_lab.hjb_solver import (
    ControlProblem,
    HorizonError,
    double_integrator_problem,
    dp_step,
    evolve_hjb,
    hamiltonian_eval,
    hj_consistency_check,
    integrator_problem,
    make_hjb,
)
from maxplus_lab.semigroup import (
    Verdict,
    check_contraction,
    defect_max_additivity,
    defect_monotonicity,
    defect_plus_homogeneity,
    ordered_pairs,
    sample_functions,
    sample_pairs,
)


def windowed_max(grid, phi_fn, t, fine=20001):
    y = np.linspace(grid.xmin, grid.xmax, fine)
    return np.array([phi_fn(y[np.abs(y - x) <= t]).max() for x in grid.x])


def constant_problem(grid, velocity, reward, controls=(0.0,)):
    return ControlProblem(
        grid, np.array(controls), lambda x, u: velocity + 0.0 * (x + u), lambda x, u: reward + 0.0 * (x + u),
        GridFunction.theta(grid), 2.0, True, "constant",
    )


class TestControlProblem:
    def test_empty_controls(self, grid):
        with pytest.raises(ValueError):
            constant_problem(grid, 0.0, 0.0, controls=())

    def test_unbounded_reward(self, grid):
        with pytest.raises(ValueError):
            ControlProblem(grid, np.array([0.0]), lambda x, u: u + 0 * x, lambda x, u: np.where(x > 0, np.inf, 0.0) + 0 * u,
                           GridFunction.theta(grid), 1.0)

    def test_bad_horizon(self, grid):
        with pytest.raises(ValueError):
            integrator_problem(grid, horizon=0.0)


class TestHamiltonian:
    def test_integrator_is_abs(self, grid):
        P = integrator_problem(grid)
        p = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(hamiltonian_eval(P, 0.0 * p, p), np.abs(p), atol=1e-12)

    def test_singleton(self, grid):
        P = constant_problem(grid, 0.5, 0.25)
        assert hamiltonian_eval(P, 0.1, 2.0) == 0.25 + 2.0 * 0.5

    def test_zero_gradient(self, grid):
        P = double_integrator_problem(grid)
        assert hamiltonian_eval(P, 0.3, 0.0) == pytest.approx(0.0)


class TestDpStep:
    def test_no_motion_no_reward(self, grid, rng):
        P = constant_problem(grid, 0.0, 0.0)
        v = GridFunction(grid, rng.normal(size=grid.n))
        assert dp_step(P, v, 0.1) == v

    def test_pure_reward(self, grid, rng):
        P = constant_problem(grid, 0.0, 1.0)
        v = GridFunction(grid, rng.normal(size=grid.n))
        np.testing.assert_allclose(dp_step(P, v, 0.1).values, v.values + 0.1, rtol=0, atol=1e-15)

    def test_dt_positive(self, grid):
        with pytest.raises(ValueError):
            dp_step(integrator_problem(grid), GridFunction.theta(grid), 0.0)


class TestEvolve:
    def test_zero_time(self, grid):
        phi = GridFunction.from_callable(grid, lambda x: -x * x)
        assert evolve_hjb(integrator_problem(grid, phi), phi, 0.0) is phi

    def test_windowed_max_oracle(self):
        g = Grid(-4.0, 4.0, 256)
        phi_fn = lambda x: -x * x
        phi = GridFunction.from_callable(g, phi_fn)
        P = integrator_problem(g, phi)
        v = evolve_hjb(P, phi, 1.0)
        dt = 0.5 * g.dx
        assert np.max(np.abs(v.values - windowed_max(g, phi_fn, 1.0))) <= 3 * (g.dx + dt)
        i = int(np.argmin(np.abs(g.x)))
        assert v.values[i] == pytest.approx(0.0, abs=3 * (g.dx + dt))

    def test_horizon(self, grid):
        P = integrator_problem(grid, horizon=1.0)
        with pytest.raises(HorizonError):
            evolve_hjb(P, GridFunction.theta(grid), 1.5)

    def test_bottom_terminal_reward(self):
        g = Grid(-2.0, 2.0, 64)
        v = np.where(np.abs(g.x) < 0.5, 0.0, -np.inf)
        phi = GridFunction(g, v)
        P = integrator_problem(g, phi, samples=3)
        out = make_hjb(P, dt=g.dx).evolve(0.5, phi)
        reach = np.abs(g.x) < 1.0 - 1e-9
        assert np.all(np.isfinite(out.values[reach]))
        assert np.all(np.isneginf(out.values[np.abs(g.x) > 1.0 + 1e-9]))

    def test_reward_bound(self):
        g = Grid(-3.0, 3.0, 128)
        phi_fn = np.sin
        phi = GridFunction.from_callable(g, phi_fn)
        P = double_integrator_problem(g, phi)
        t = 0.5
        v = evolve_hjb(P, phi, t)
        radius = t * P.max_speed()
        assert np.max(np.abs(v.values - phi.values)) <= t * P.reward_bound() + radius + 1e-12

    def test_trajectory(self, grid):
        traj = []
        evolve_hjb(integrator_problem(grid), GridFunction.theta(grid), 0.5, trajectory=traj)
        assert traj[0][0] == 0.0 and traj[-1][0] == pytest.approx(0.5)


class TestLinearity:
    def test_node_aligned_max_additive(self):
        g = Grid(-2.0, 2.0, 128)
        P = integrator_problem(g, samples=3)
        T = make_hjb(P, dt=g.dx)
        assert defect_max_additivity(T, 0.5, sample_pairs(g, 20)).defect == 0.0

    def test_off_grid_interpolation_breaks_max_additivity(self):
        g = Grid(-2.0, 2.0, 128)
        T = make_hjb(integrator_problem(g))
        assert defect_max_additivity(T, 0.5, sample_pairs(g, 20)).defect > 0

    def test_homogeneous_monotone_contractive(self):
        g = Grid(-2.0, 2.0, 128)
        T = make_hjb(double_integrator_problem(g))
        assert defect_plus_homogeneity(T, 0.5, 2.5, sample_functions(g, 10)).verdict is Verdict.EXACT
        assert defect_monotonicity(T, 0.5, ordered_pairs(g, 10)).defect == 0.0
        assert check_contraction(T, [0.25, 0.5], sample_pairs(g, 10)).verdict is Verdict.EXACT


class TestConsistency:
    def test_zero_time(self, grid):
        assert hj_consistency_check(integrator_problem(grid), GridFunction.theta(grid), 0.0) == 0.0

    def test_integrator_refines(self):
        d = []
        for n in (128, 256, 512):
            g = Grid(-4.0, 4.0, n)
            phi = GridFunction.from_callable(g, lambda x: -x * x)
            d.append(hj_consistency_check(integrator_problem(g, phi), phi, 1.0))
        assert d[0] > d[1] > d[2]
        assert d[2] <= 3 * (8 / 512) * 1.5

    def test_singleton_control_translates(self):
        g = Grid(-2.0, 2.0, 128)
        phi = GridFunction.from_callable(g, np.sin)
        P = ControlProblem(g, np.array([0.5]), lambda x, u: u + 0 * x, lambda x, u: 0 * (x + u), phi, 1.0, True)
        assert hj_consistency_check(P, phi, 0.5) <= g.dx

    def test_state_dependent_refused(self, grid):
        with pytest.raises(ValueError):
            hj_consistency_check(double_integrator_problem(grid), GridFunction.theta(grid), 0.5)
