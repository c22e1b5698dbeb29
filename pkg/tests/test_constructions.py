import math

import numpy as np
import pytest

from maxplus_lab.constructions import (
    ConstructionError,
    QuotientVerdict,
    RescaleVariant,
    conjugate,
    is_concave,
    is_nonnegative,
    is_nonpositive,
    mp_identity,
    mp_matvec,
    plus_shift,
    product,
    quotient_apply,
    quotient_equivalent,
    reflection,
    rescale,
    restrict,
)
from maxplus_lab.function_space import Grid, GridFunction
from maxplus_lab.hj_solver import make_hopf_lax, quadratic_lagrangian
from maxplus_lab.semigroup import (
    SemigroupOperator,
    Verdict,
    check_contraction,
    defect_max_additivity,
    defect_plus_homogeneity,
    identity_semigroup,
    make_translation,
    sample_functions,
    sample_pairs,
)

NEG_INF = -math.inf


@pytest.fixture
def hopf_lax():
    return make_hopf_lax(quadratic_lagrangian())


class TestRescale:
    def test_trivial_parameters(self, grid, hopf_lax):
        f = sample_functions(grid, 1)[0]
        for variant in RescaleVariant:
            assert rescale(hopf_lax, 1.0, 0.0, variant).evolve(0.4, f) == hopf_lax.evolve(0.4, f)

    def test_additive_constant(self, grid):
        S = rescale(identity_semigroup(), 1.0, 1.0, "ADDITIVE")
        assert S.evolve(2.0, GridFunction.theta(grid)) == GridFunction.constant(grid, 2.0)

    def test_multiplicative_breaks_homogeneity(self, grid):
        S = rescale(identity_semigroup(), 1.0, 1.0, RescaleVariant.MULTIPLICATIVE)
        rep = defect_plus_homogeneity(S, 1.0, 1.0, [GridFunction.constant(grid, 1.0)])
        assert rep.defect == pytest.approx(math.e - 1, abs=1e-12)
        assert rep.verdict is Verdict.VIOLATED

    def test_additive_preserves_defects(self, grid, hopf_lax):
        S = rescale(hopf_lax, 1.0, 0.75, "ADDITIVE")
        pairs = sample_pairs(grid, 10)
        a = defect_max_additivity(hopf_lax, 0.5, pairs)
        b = defect_max_additivity(S, 0.5, pairs)
        assert a.values == b.values

    def test_additive_contraction(self, grid, hopf_lax):
        S = rescale(hopf_lax, 2.0, 3.0)
        assert check_contraction(S, [0.25, 0.5], sample_pairs(grid, 10)).verdict is Verdict.EXACT

    def test_alpha_must_be_positive(self, hopf_lax):
        with pytest.raises(ValueError):
            rescale(hopf_lax, 0.0, 1.0)


class TestProduct:
    def test_with_identity(self, periodic_grid):
        T = make_translation()
        S = product(T, identity_semigroup(), sample_functions(periodic_grid, 4))
        f = sample_functions(periodic_grid, 1, seed=9)[0]
        assert S.evolve(0.25, f) == T.evolve(0.25, f)

    def test_translations_compose(self, periodic_grid):
        T = make_translation()
        S = product(T, T, sample_functions(periodic_grid, 4))
        f = sample_functions(periodic_grid, 1, seed=9)[0]
        t = 4 * periodic_grid.dx
        assert S.evolve(t, f) == T.evolve(2 * t, f)

    def test_non_commuting_refused(self, periodic_grid):
        T = make_translation()
        weight = 1.0 + periodic_grid.x
        V = SemigroupOperator(lambda t, f: f.with_values(f.values * np.exp(-t * weight)), "damping")
        with pytest.raises(ConstructionError):
            product(T, V, sample_functions(periodic_grid, 3))


class TestRestrict:
    def test_concave_hopf_lax_accepted(self, hopf_lax):
        g = Grid(-2.0, 2.0, 64)
        samples = [GridFunction.from_callable(g, lambda x, c=c: -c * x * x) for c in (0.5, 1.0, 2.0)]
        S = restrict(hopf_lax, is_concave, samples, name="concave")
        with pytest.raises(ValueError):
            S.evolve(0.5, GridFunction.from_callable(g, lambda x: x * x))

    def test_nonpositive_translation_accepted(self, periodic_grid):
        samples = [f.with_values(f.values - 5.0) for f in sample_functions(periodic_grid, 4)]
        restrict(make_translation(), is_nonpositive, samples)

    def test_nonnegative_refused_by_negative_rescale(self, grid):
        samples = [GridFunction.constant(grid, 0.5), GridFunction.constant(grid, 0.1)]
        with pytest.raises(ConstructionError):
            restrict(rescale(identity_semigroup(), 1.0, -1.0), is_nonnegative, samples)


class TestConjugate:
    def test_identity_map(self, grid, hopf_lax):
        f = sample_functions(grid, 1)[0]
        S = conjugate(hopf_lax, lambda h: h, lambda h: h, [f])
        assert S.evolve(0.3, f) == hopf_lax.evolve(0.3, f)

    def test_reflection_reverses_translation(self, periodic_grid):
        f = sample_functions(periodic_grid, 1)[0]
        S = conjugate(make_translation("LEFT"), reflection, reflection, [f], "R")
        t = 3 * periodic_grid.dx
        assert S.evolve(t, f) == make_translation("RIGHT").evolve(t, f)

    def test_shift_cancels_for_homogeneous(self, grid, hopf_lax):
        samples = sample_functions(grid, 4)
        S = conjugate(hopf_lax, plus_shift(0.5), plus_shift(-0.5), [GridFunction.theta(grid)])
        worst = max(float(np.max(np.abs(S.evolve(0.5, f).values - hopf_lax.evolve(0.5, f).values))) for f in samples)
        assert worst <= 1e-12

    def test_non_inverse_refused(self, grid, hopf_lax):
        with pytest.raises(ConstructionError):
            conjugate(hopf_lax, plus_shift(0.5), plus_shift(0.5), [GridFunction.theta(grid)])


class TestQuotient:
    def test_reflexive(self):
        res = quotient_equivalent([0.0, -1.0], [0.0, -1.0], [[0.0, 0.0]])
        assert res.verdict is QuotientVerdict.EQUIVALENT

    def test_theta_span(self):
        res = quotient_equivalent([0.0, -1.0], [-1.0, 0.0], [[0.0, 0.0]])
        assert res.verdict is QuotientVerdict.EQUIVALENT
        np.testing.assert_array_equal(np.maximum([0.0, -1.0], res.g1), np.maximum([-1.0, 0.0], res.g2))

    def test_frozen_coordinate(self):
        res = quotient_equivalent([NEG_INF, 0.0], [NEG_INF, 1.0], [[0.0, NEG_INF]])
        assert res.verdict is QuotientVerdict.NOT_EQUIVALENT
        # brute force over a coefficient grid confirms no witness exists
        for a in np.arange(-5, 6):
            for b in np.arange(-5, 6):
                g1, g2 = np.array([a, NEG_INF]), np.array([b, NEG_INF])
                assert not np.array_equal(np.maximum([NEG_INF, 0.0], g1), np.maximum([NEG_INF, 1.0], g2))

    def test_symmetric(self):
        D = [[0.0, 1.0, NEG_INF], [NEG_INF, 0.0, 2.0]]
        f1, f2 = [3.0, 0.0, 1.0], [1.0, 0.0, 3.0]
        assert quotient_equivalent(f1, f2, D).verdict is quotient_equivalent(f2, f1, D).verdict

    def test_random_integer_instances_agree_with_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            f1 = rng.integers(-2, 3, 3).astype(float)
            f2 = rng.integers(-2, 3, 3).astype(float)
            D = [rng.integers(-2, 3, 3).astype(float)]
            res = quotient_equivalent(f1, f2, D)
            grid = np.arange(-6, 7, dtype=float)
            found = any(
                np.array_equal(np.maximum(f1, D[0] + a), np.maximum(f2, D[0] + b)) for a in grid for b in grid
            ) or np.array_equal(f1, f2)
            assert (res.verdict is QuotientVerdict.EQUIVALENT) == found

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            quotient_equivalent([0.0], [0.0, 1.0], [[0.0, 0.0]])

    def test_iteration_cap(self):
        res = quotient_equivalent([0.0, -1.0], [-1.0, 0.0], [[0.0, 0.0]], max_iter=0)
        assert res.verdict is QuotientVerdict.UNKNOWN


class TestQuotientApply:
    def test_identity_matrix(self):
        out = quotient_apply(mp_identity(2), [1.0, 0.0], [[0.0, 0.0]])
        np.testing.assert_array_equal(out, [1.0, 0.0])

    def test_integer_example(self):
        T = [[0.0, -1.0], [-1.0, 0.0]]
        D = [[0.0, 0.0]]
        out = quotient_apply(T, [1.0, 0.0], D)
        np.testing.assert_array_equal(out, [1.0, 0.0])
        alt = quotient_apply(T, np.maximum([1.0, 0.0], [0.0, 0.0]), D)
        assert quotient_equivalent(out, alt, D).verdict is QuotientVerdict.EQUIVALENT

    def test_whole_space_single_class(self):
        D = [[0.0, NEG_INF], [NEG_INF, 0.0]]
        a = quotient_apply(mp_identity(2), [3.0, -1.0], D)
        b = quotient_apply(mp_identity(2), [-4.0, 2.0], D)
        assert quotient_equivalent(a, b, D).verdict is QuotientVerdict.EQUIVALENT

    def test_non_invariant_refused(self):
        T = [[NEG_INF, 0.0], [NEG_INF, NEG_INF]]  # moves the generator onto the first axis
        with pytest.raises(ConstructionError):
            quotient_apply(T, [0.0, 0.0], [[NEG_INF, 0.0]])

    def test_matvec(self):
        np.testing.assert_array_equal(mp_matvec([[0.0, 1.0], [NEG_INF, 2.0]], [1.0, NEG_INF]), [1.0, NEG_INF])
