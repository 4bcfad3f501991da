import numpy as np
import pytest

from conftest import CR, random_game
from menuopt import lp
from menuopt.approachability import direction_slacks, test_assignment_valid
from menuopt.bruteforce import grid_maximin_opt
from menuopt.core import BimatrixGame, Csp, CspAssignment, bilinear_value
from menuopt.errors import ThresholdInfeasible
from menuopt.maximin import (
    HedgeState,
    blackwell_abort_step,
    hedge_update,
    hedge_weights,
    make_aborter_adversary,
    make_schedule_adversary,
    random_adversary,
    run_blackwell_abort,
    run_maximin,
    threshold_assignment,
)
from menuopt.menus import candidate_menu, candidate_utility_set, response_satisfiable_at


def test_threshold_assignment_bottom_level_gives_argmaxes():
    rng = np.random.default_rng(80)
    for _ in range(10):
        game = random_game(rng, 2, 2, 2)
        V = float(np.min(game.u_L)) - 1.0
        assign = threshold_assignment(game, V)
        for i in range(game.k):
            got = bilinear_value(game.u_O(i), assign[i])
            assert got == pytest.approx(float(np.max(game.u_O(i))), abs=1e-7)


def test_threshold_assignment_top_level_unique_argmax():
    u_L = np.array([[1.0, 0.0], [0.2, -0.3]])
    game = BimatrixGame(u_L, ((np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0),))
    assign = threshold_assignment(game, 1.0)
    assert np.allclose(assign[0].weights, [1.0, 0.0, 0.0, 0.0], atol=1e-8)


def test_threshold_assignment_g1_level5(g1):
    # the u_O-optimal profile of the level-5 set is the pure pair (C, R):
    # learner value 7 >= 5 and opponent value 3 beat every mixture
    assign = threshold_assignment(g1, 5.0)
    expect = np.zeros(6)
    expect[CR] = 1.0
    assert np.allclose(assign[0].weights, expect, atol=1e-7)
    assert bilinear_value(g1.u_O(0), assign[0]) == pytest.approx(3.0, abs=1e-7)


def test_threshold_infeasible_above_max(g1):
    with pytest.raises(ThresholdInfeasible):
        threshold_assignment(g1, 7.2)


def test_threshold_assignment_is_incentive_compatible():
    from menuopt.menus import incentive_check

    rng = np.random.default_rng(81)
    for _ in range(10):
        game = random_game(rng, 2, 2, 2)
        V = float(rng.uniform(np.min(game.u_L), np.max(game.u_L)))
        assert incentive_check(threshold_assignment(game, V), game, slack=1e-7)


def test_step_never_aborts_on_argmax_assignment():
    rng = np.random.default_rng(82)
    for _ in range(5):
        game = random_game(rng, 2, 2, 1)
        w = np.zeros(4)
        w[int(np.argmax(game.u_O(0).ravel()))] = 1.0
        assign = CspAssignment((Csp(w),))
        state = HedgeState.fresh(1, game.p_max)
        for _ in range(5):
            step = blackwell_abort_step(state, assign, game)
            assert not step.aborted
            y = rng.dirichlet(np.ones(2))
            state = hedge_update(state, step.action, y, assign, game)


def test_step_aborts_below_cap_immediately():
    rng = np.random.default_rng(83)
    found = 0
    for _ in range(20):
        game = random_game(rng, 2, 2, 1)
        cap, _, _ = lp.zero_sum_value(game.u_O(0))
        lo = float(np.min(game.u_O(0)))
        if cap - lo < 0.1:
            continue
        found += 1
        u = game.u_O(0).ravel()
        lam = ((cap - 0.05) - lo) / (float(np.max(u)) - lo)
        w = np.zeros(4)
        w[int(np.argmax(u))] = lam
        w[int(np.argmin(u))] = 1.0 - lam
        assign = CspAssignment((Csp(w),))
        step = blackwell_abort_step(HedgeState.fresh(1, game.p_max), assign, game)
        assert step.aborted
        # the abort certificate refutes response satisfiability outright
        menu = candidate_menu(assign, 0.0, game)
        assert response_satisfiable_at(menu, step.certificate, game) is None
    assert found >= 8


def test_step_plays_on_g1_level5_assignment(g1):
    assign = threshold_assignment(g1, 5.0)
    assert test_assignment_valid(assign, g1, 0.05).approachable
    state = HedgeState.fresh(1, g1.p_max)
    rng = np.random.default_rng(84)
    for _ in range(20):
        step = blackwell_abort_step(state, assign, g1)
        assert not step.aborted
        state = hedge_update(state, step.action, rng.dirichlet(np.ones(2)), assign, g1)


def test_hedge_zero_reward_keeps_weights(g1):
    assign = threshold_assignment(g1, 5.0)
    state = HedgeState.fresh(1, g1.p_max)
    c = candidate_utility_set(assign, 0.0, g1).thresholds
    # engineered x, y with u_O(x, y) equal to the threshold -> zero reward
    state2 = HedgeState(np.array([1.0]), 7, np.zeros(1), g1.p_max)
    new = hedge_update(state2, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0]), assign, g1)
    assert new.cumulative[0] == pytest.approx(3.0 - c[0])  # u_O(C,R)=3=c
    assert np.allclose(new.p, [1.0])


def test_hedge_state_matches_closed_form():
    rng = np.random.default_rng(91)
    for _ in range(20):
        k = int(rng.integers(2, 5))
        t = int(rng.integers(1, 50))
        p_max = float(rng.uniform(0.5, 8.0))
        cum = rng.uniform(-3, 3, size=k)
        eta = np.sqrt(np.log(k) / t) / (2.0 * p_max)
        manual = np.exp(eta * cum - np.max(eta * cum))
        manual /= manual.sum()
        assert np.allclose(hedge_weights(cum, t, p_max), manual, atol=1e-12)
        assert abs(hedge_weights(cum, t, p_max).sum() - 1.0) <= 1e-12


def test_hedge_dominant_expert_takes_over():
    p_max = 1.0
    cum = np.zeros(2)
    prev = 0.5
    for t in range(1, 200):
        cum += np.array([1.0, -1.0])
        p = hedge_weights(cum, t, p_max)
        assert p[0] >= prev - 1e-12
        prev = p[0]
    assert prev > 0.99


def test_hedge_regret_bound_on_random_stream():
    rng = np.random.default_rng(85)
    for k in (2, 3):
        p_max = 1.0
        cum = np.zeros(k)
        total_weighted = 0.0
        for t in range(1, 2001):
            p = hedge_weights(cum, t - 1, p_max)
            r = rng.uniform(-2 * p_max, 2 * p_max, size=k)
            total_weighted += float(p @ r)
            cum += r
            regret = float(np.max(cum)) - total_weighted
            assert regret <= 4 * p_max * np.sqrt(t * np.log(k)) + 1e-9


def test_run_blackwell_regret_and_no_aborts():
    rng = np.random.default_rng(86)
    done = 0
    for _ in range(10):
        game = random_game(rng, 2, 2, 2)
        assign = threshold_assignment(game, float(np.min(game.u_L)))
        slacks = direction_slacks(assign, game, 0.05)
        if slacks.min() < 0.05:  # want a comfortable margin
            continue
        done += 1
        run = run_blackwell_abort(game, assign, random_adversary, 3000, seed=done)
        assert run.aborted_at is None
        cum = np.cumsum(run.rewards, axis=0)
        bound = 4 * game.p_max * np.sqrt(
            (np.arange(1, 3001)) * np.log(game.k)
        )
        assert np.all(cum.max(axis=1) <= bound + 1e-9)
    assert done >= 3


def test_run_maximin_constant_learner_payoff():
    rng = np.random.default_rng(87)
    game = BimatrixGame(np.full((2, 2), 0.4), ((rng.uniform(-1, 1, (2, 2)), 1.0),))
    run = run_maximin(game, 0.05, random_adversary, 500, seed=0)
    assert run.final_V == pytest.approx(0.4)
    assert run.abort_count == 0
    assert run.learner_avg == pytest.approx(0.4, abs=1e-9)


def test_run_maximin_aborter_reaches_grid_opt():
    rng = np.random.default_rng(88)
    for trial in range(3):
        game = random_game(rng, 2, 2, 2)
        run = run_maximin(game, 0.05, make_aborter_adversary(0.02), 4000, seed=trial)
        opt = grid_maximin_opt(game, 0.05, 0.02)
        assert run.final_V >= opt - 0.05 - 0.02 - 1e-9


def test_run_maximin_menus_nest_across_epochs(g1):
    run = run_maximin(g1, 0.05, make_aborter_adversary(0.02), 2000, seed=1)
    assert run.abort_count >= 1
    prev = None
    for epoch in run.epochs:
        c = candidate_utility_set(epoch.assignment, 0.0, g1).thresholds
        if prev is not None:
            assert np.all(c >= prev - 1e-9)  # relaxing thresholds only
        prev = c


def test_run_maximin_bestresponse_per_type_cap():
    # the forcing dynamics cap each type's average at its threshold plus
    # the constraint-regret allowance; reaching the threshold from below
    # is the cooperative playback realization's job, not this loop's
    rng = np.random.default_rng(89)
    T = 4000
    for trial in range(3):
        game = random_game(rng, 2, 2, 2)
        for i in range(game.k):
            run = run_maximin(game, 0.05, make_schedule_adversary(i), T, seed=trial)
            final = run.epochs[-1].assignment
            c_i = bilinear_value(game.u_O(i), final[i])
            bound = 4 * game.p_max * np.sqrt(np.log(game.k) / T)
            tail = run.rewards[run.epochs[-1].start_round :, i]
            assert tail.mean() <= bound + 0.05
            assert run.per_type_avg[i] <= c_i + bound + 0.1


def test_run_maximin_determinism(g1):
    a = run_maximin(g1, 0.05, make_aborter_adversary(0.02), 800, seed=3)
    b = run_maximin(g1, 0.05, make_aborter_adversary(0.02), 800, seed=3)
    assert a.final_V == b.final_V
    assert np.array_equal(a.transcript.xs, b.transcript.xs)
    assert np.array_equal(a.transcript.ys, b.transcript.ys)


def test_fast_step_matches_public_step():
    rng = np.random.default_rng(90)
    for _ in range(20):
        game = random_game(rng, 3, 2, 2)
        assign = CspAssignment(
            tuple(Csp(rng.dirichlet(np.ones(6))) for _ in range(2))
        )
        state = HedgeState(rng.dirichlet(np.ones(2)), 5, rng.uniform(-1, 1, 2), game.p_max)
        fast = blackwell_abort_step(state, assign, game)
        # generic-path reference: solve the weighted game exactly
        omega = np.tensordot(state.p, game.opponent_payoffs, axes=(0, 0))
        c = candidate_utility_set(assign, 0.0, game).thresholds
        val, x, y = lp.zero_sum_value(omega)
        kappa = float(state.p @ c)
        assert fast.aborted == (val > kappa + 1e-9)
        if not fast.aborted:
            worst = float(np.max(fast.action @ omega))
            assert worst <= kappa + 1e-8
