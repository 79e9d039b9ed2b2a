import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mocodes.distributions import payoff_exp_avg, shannon_lengths, validate_and_sort
from mocodes.errors import AlphaOutOfRange, NoConvergence, TOutOfRange
from mocodes.merge_weights import optimal_lengths_p1
from mocodes.tilted import (
    _solve_damped,
    closed_form_alpha1,
    solve_lengths_p2,
    solve_p1_via_limit,
    solve_redundancy_p2,
)

from conftest import models, random_model
from oracles import fixed_point_defect as oracle_defect
from oracles import grid_min_exp_avg

TWO = validate_and_sort([0.75, 0.25])
UNIFORM = validate_and_sort([0.25] * 4)


def alpha1_by_hand(p, t):
    # -(1/(1+t)) log2 p + log2 sum p^(1/(1+t)), term by term
    z = sum(x ** (1 / (1 + t)) for x in p)
    return [-math.log2(x) / (1 + t) + math.log2(z) for x in p]


def fixed_point_defect(sol, m, redundancy=False):
    return oracle_defect(sol.lengths.lengths, m.probs, sol.alpha, sol.t, redundancy)


class TestSolveLengths:
    @pytest.mark.parametrize("t", [-0.5, 0.5, 1, 7])
    def test_alpha0_shannon_exact(self, worked_model, t):
        sol = solve_lengths_p2(worked_model, 0, t)
        assert np.array_equal(sol.lengths.lengths, shannon_lengths(worked_model))

    def test_t0_shannon(self, worked_model):
        sol = solve_lengths_p2(worked_model, 0.6, 0)
        assert np.array_equal(sol.lengths.lengths, shannon_lengths(worked_model))

    def test_alpha1_two_symbols(self):
        sol = solve_lengths_p2(TWO, 1, 1)
        expected = alpha1_by_hand([0.75, 0.25], 1)
        assert np.allclose(sol.lengths.lengths, expected, rtol=0, atol=1e-9)
        assert expected[0] == pytest.approx(0.657503, abs=1e-6)
        assert expected[1] == pytest.approx(1.449984, abs=1e-6)

    @pytest.mark.parametrize("alpha, t", [(0.3, 1), (1, 5), (0.9, -0.5)])
    def test_uniform_symmetry(self, alpha, t):
        sol = solve_lengths_p2(UNIFORM, alpha, t)
        assert np.allclose(sol.lengths.lengths, 2, rtol=0, atol=1e-12)

    def test_errors(self, worked_model):
        with pytest.raises(AlphaOutOfRange):
            solve_lengths_p2(worked_model, 2, 1)
        with pytest.raises(TOutOfRange):
            solve_lengths_p2(worked_model, 0.5, -1)
        with pytest.raises(ValueError):
            solve_lengths_p2(worked_model, 0.5, 1, method="newton")

    @given(models(max_size=12), st.floats(0, 1), st.sampled_from([-0.9, -0.3, 0.5, 1, 2, 10, 300]))
    @settings(max_examples=80, deadline=None)
    def test_solution_invariants(self, m, alpha, t):
        sol = solve_lengths_p2(m, alpha, t)
        assert sol.residual <= 1e-10
        assert fixed_point_defect(sol, m) <= 1e-10
        assert abs(sol.tilted.sum() - 1) <= 1e-10 and np.all(sol.tilted >= 0)
        assert abs(sol.lengths.kraft - 1) <= 1e-9

    @given(models(max_size=10), st.sampled_from([0.25, 0.5, 0.75]), st.sampled_from([0.5, 1, 2, 5]))
    @settings(max_examples=20, deadline=None)
    def test_damped_route_agrees(self, m, alpha, t):
        fast = solve_lengths_p2(m, alpha, t)
        slow = solve_lengths_p2(m, alpha, t, method="damped")
        assert np.allclose(fast.lengths.lengths, slow.lengths.lengths, rtol=0, atol=1e-9)

    def test_damped_gives_up_at_huge_t(self, worked_model):
        # the relaxation needs damping below ~2/(1+t); capped budgets fail at t=1000
        with pytest.raises(NoConvergence):
            _solve_damped(worked_model.probs, np.log(worked_model.probs), 0.5, 1000.0, math.log(2), max_iter=500, halvings=1)

    def test_continuity_in_alpha(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            m = random_model(rng, 5)
            for t in (0.5, 2):
                for a in np.linspace(0, 0.99, 12):
                    base = solve_lengths_p2(m, a, t).lengths.lengths
                    d3 = np.max(np.abs(solve_lengths_p2(m, a + 1e-3, t).lengths.lengths - base))
                    d4 = np.max(np.abs(solve_lengths_p2(m, a + 1e-4, t).lengths.lengths - base))
                    # Lipschitz: shrinking the step tenfold shrinks the change about tenfold
                    assert d4 <= 0.2 * d3 + 1e-12

    @settings(max_examples=10, deadline=None)
    @given(models(min_size=2, max_size=4))
    def test_beats_simplex_grid(self, m):
        alphas = [0, 0.25, 0.5, 0.75, 1]
        for t in (0.5, 1, 2):
            best = grid_min_exp_avg(m.probs, alphas, t)
            for a, g in zip(alphas, best):
                assert payoff_exp_avg(solve_lengths_p2(m, a, t).lengths, m, a, t) <= g + 1e-6



class TestClosedForm:
    def test_t0_shannon(self, worked_model):
        assert np.allclose(closed_form_alpha1(worked_model, 0).lengths, shannon_lengths(worked_model), atol=1e-14)

    @pytest.mark.parametrize("t", [0.5, 3, 100])
    def test_uniform(self, t):
        assert np.allclose(closed_form_alpha1(UNIFORM, t).lengths, 2, atol=1e-13)

    def test_two_symbol_value(self):
        assert np.allclose(closed_form_alpha1(TWO, 1).lengths, alpha1_by_hand([0.75, 0.25], 1), atol=1e-14)

    @given(models(max_size=20), st.floats(-0.95, 50))
    def test_kraft_and_solver_agreement(self, m, t):
        cf = closed_form_alpha1(m, t)
        assert abs(cf.kraft - 1) <= 1e-12
        assert np.allclose(solve_lengths_p2(m, 1, t).lengths.lengths, cf.lengths, rtol=0, atol=1e-9)

    def test_range(self, worked_model):
        with pytest.raises(TOutOfRange):
            closed_form_alpha1(worked_model, -3)


class TestRedundancy:
    def test_alpha0(self, worked_model):
        sol = solve_redundancy_p2(worked_model, 0, 2)
        assert np.array_equal(sol.lengths.lengths, shannon_lengths(worked_model))

    def test_uniform(self):
        assert np.allclose(solve_redundancy_p2(UNIFORM, 0.7, 3).lengths.lengths, 2, atol=1e-12)

    def test_two_symbol_fixed_point(self):
        sol = solve_redundancy_p2(TWO, 1, 1)
        assert fixed_point_defect(sol, TWO, redundancy=True) < 1e-10

    @given(models(max_size=10), st.floats(0, 1), st.sampled_from([0.5, 2, 50]))
    @settings(deadline=None)
    def test_shannon_is_the_fixed_point(self, m, alpha, t):
        # zero pointwise redundancy is optimal for real lengths
        sol = solve_redundancy_p2(m, alpha, t)
        assert fixed_point_defect(sol, m, redundancy=True) <= 1e-10
        assert np.allclose(sol.lengths.lengths, shannon_lengths(m), rtol=0, atol=1e-9)


class TestLimit:
    @pytest.mark.parametrize("alpha", [1 / 16, 1 / 8, 1 / 2])
    def test_converges_to_merging_solution(self, worked_model, alpha):
        exact = optimal_lengths_p1(worked_model, alpha).lengths
        gaps = [np.max(np.abs(solve_lengths_p2(worked_model, alpha, t).lengths.lengths - exact)) for t in (10, 100, 1000)]
        assert gaps[0] > gaps[1] > gaps[2]
        _, gap = solve_p1_via_limit(worked_model, alpha, 1000)
        assert gap == gaps[2] and gap < 0.02

    def test_worked_huffman_point(self, worked_model):
        approx, gap = solve_p1_via_limit(worked_model, 1 / 16, 1000)
        assert np.max(np.abs(approx.lengths - [1, 2, 3, 3])) < 0.02

    def test_alpha0_exact(self, worked_model):
        approx, gap = solve_p1_via_limit(worked_model, 0, 500)
        assert np.array_equal(approx.lengths, shannon_lengths(worked_model))
        assert gap < 1e-12

    def test_uniform_exact(self):
        approx, gap = solve_p1_via_limit(UNIFORM, 0.4, 1000)
        assert np.all(approx.lengths == 2) and gap < 1e-12

    def test_t_max_floor(self, worked_model):
        with pytest.raises(ValueError):
            solve_p1_via_limit(worked_model, 0.5, 50)
