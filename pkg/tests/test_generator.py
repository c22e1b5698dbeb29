import math

import numpy as np
import pytest

from maxplus_lab.function_space import Grid, GridFunction
from maxplus_lab.generator import (
    GENERATOR_CSV_FIELDS,
    SchemeGenerator,
    check_translation_invariance,
    dissipativity_probe,
    generator_estimate,
    generator_max_additivity_counterexample,
    generator_rows_to_csv,
    solve_resolvent,
)
from maxplus_lab.hj_solver import make_hopf_lax, quadratic_lagrangian
from maxplus_lab.hjb_solver import hamiltonian_eval, integrator_problem, make_hjb
from maxplus_lab.semigroup import Verdict, make_translation, sample_pairs


@pytest.fixture
def hopf_lax():
    return make_hopf_lax(quadratic_lagrangian())


class TestEstimate:
    def test_translation_sin(self):
        """Left translation: A f = f'."""
        g = Grid(0.0, 2 * np.pi, 512, periodic=True)
        f = GridFunction.from_callable(g, np.sin)
        t_seq = [4 * g.dx, 2 * g.dx, g.dx]
        est = generator_estimate(make_translation(), f, t_seq)
        assert np.max(np.abs(est.Af.values - np.cos(g.x))) <= 2 * (t_seq[-1] + g.dx)

    def test_hopf_lax_sign(self):
        """Sup-form: v_t = H(v_x), so A f = H(f') = x^2/2 for f = -x^2/2."""
        g = Grid(-4.0, 4.0, 1024)
        f = GridFunction.from_callable(g, lambda x: -0.5 * x * x)
        est = generator_estimate(make_hopf_lax(quadratic_lagrangian()), f, [0.2, 0.1, 0.05], richardson_order=2)
        inner = (np.abs(g.x) < 2.5) & est.domain_mask
        assert inner.any()
        assert np.max(np.abs(est.Af.values - 0.5 * g.x**2)[inner]) <= 0.05

    def test_constant_has_zero_generator(self, grid, hopf_lax):
        est = generator_estimate(hopf_lax, GridFunction.constant(grid, 2.0), [0.2, 0.1])
        assert np.all(est.Af.values == 0.0) and est.mask_fraction == 0.0

    def test_hjb_generator_is_hamiltonian(self):
        g = Grid(-3.0, 3.0, 512)
        f = GridFunction.from_callable(g, np.sin)
        P = integrator_problem(g, f)
        est = generator_estimate(make_hjb(P), f, [0.04, 0.02, 0.01])
        inner = np.abs(g.x) < 2.5
        err = np.abs(est.Af.values - hamiltonian_eval(P, g.x, np.cos(g.x)))[inner]
        assert np.max(err) <= 0.05

    def test_richardson_gains_an_order(self):
        g = Grid(-2.0, 2.0, 2048, periodic=True)
        f = GridFunction.from_callable(g, lambda x: x**3)
        T = make_translation()
        t_seq = [64 * g.dx, 32 * g.dx, 16 * g.dx]
        inner = np.abs(g.x) < 1.0
        exact = 3 * g.x**2
        e0 = np.max(np.abs(generator_estimate(T, f, t_seq, 0).Af.values - exact)[inner])
        e1 = np.max(np.abs(generator_estimate(T, f, t_seq, 1).Af.values - exact)[inner])
        assert e1 < 0.1 * e0

    @pytest.mark.parametrize("t_seq", [[], [0.1, 0.2], [0.1, -0.05], [0.1, 0.1]])
    def test_bad_sequences(self, grid, hopf_lax, t_seq):
        with pytest.raises(ValueError):
            generator_estimate(hopf_lax, GridFunction.theta(grid), t_seq)


class TestTranslationInvariance:
    def test_zero_shift(self, grid, hopf_lax):
        assert check_translation_invariance(hopf_lax, GridFunction.theta(grid), 0.0, [0.1]) == 0.0

    def test_hopf_lax(self, hopf_lax):
        g = Grid(-2.0, 2.0, 256)
        f = GridFunction.from_callable(g, np.sin)
        assert check_translation_invariance(hopf_lax, f, 3.0, [0.2, 0.1, 0.05]) <= 1e-10 * 4

    def test_translation(self):
        g = Grid(0.0, 2 * np.pi, 256, periodic=True)
        f = GridFunction.from_callable(g, np.sin)
        assert check_translation_invariance(make_translation(), f, -1.0, [2 * g.dx, g.dx]) <= 1e-10 * 2


@pytest.fixture(scope="module")
def report():
    return generator_max_additivity_counterexample()


class TestCounterexample:
    def test_ordered(self, report):
        assert report.ordered_everywhere

    def test_witness(self, report):
        assert abs(report.witness_x + 0.25) <= report.grid.dx
        assert report.witness_gap >= 0.4
        assert abs(report.witness_gap - 0.4128) <= 0.05 * 0.4128
        assert report.violates_max_additivity

    def test_deterministic(self, report):
        again = generator_max_additivity_counterexample()
        assert again.witness_gap == report.witness_gap and again.witness_x == report.witness_x

    def test_no_violation_at_origin(self):
        rep = generator_max_additivity_counterexample(x_target=0.0)
        assert rep.witness_gap <= 1e-3


class TestDissipativity:
    def test_hopf_lax_resolvent(self, hopf_lax):
        g = Grid(-2.0, 2.0, 128)
        rep = dissipativity_probe(hopf_lax, SchemeGenerator(hopf_lax, 0.01), 0.1, sample_pairs(g, 32))
        assert rep.verdict is Verdict.EXACT
        assert max(rep.values) <= 1 + 1e-8

    def test_constant_is_fixed(self, grid, hopf_lax):
        c = GridFunction.constant(grid, 0.5)
        u, _ = solve_resolvent(SchemeGenerator(hopf_lax, 0.05), c, 0.1)
        np.testing.assert_allclose(u.values, c.values, atol=1e-14)

    def test_alpha_zero_rejected(self, grid, hopf_lax):
        with pytest.raises(ValueError):
            dissipativity_probe(hopf_lax, SchemeGenerator(hopf_lax, 0.05), 0.0, sample_pairs(grid, 2))

    def test_expansive_generator_flagged(self, grid, hopf_lax):
        # G(u) = u / alpha' makes the resolvent blow up; the probe must not pass
        G = lambda u: 5.0 * u.values
        rep = dissipativity_probe(hopf_lax, G, 0.1, sample_pairs(grid, 4), omega=0.5, max_iter=200)
        assert rep.verdict in (Verdict.VIOLATED, Verdict.UNKNOWN)

    def test_non_convergence_is_unknown(self, grid, hopf_lax):
        rep = dissipativity_probe(hopf_lax, SchemeGenerator(hopf_lax, 0.05), 0.1, sample_pairs(grid, 2), max_iter=2)
        assert rep.verdict is Verdict.UNKNOWN and math.isnan(rep.defect)


class TestCsv:
    def test_rows(self):
        text = generator_rows_to_csv([("op", "sin", 0.01, 1, 0.002, 0.0)], "h")
        lines = text.splitlines()
        assert lines[1] == ",".join(GENERATOR_CSV_FIELDS)
        assert lines[2] == "op,sin,0.01,1,0.002,0.0"
