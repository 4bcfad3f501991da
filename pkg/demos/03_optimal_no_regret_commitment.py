"""Optimal commitment over no-regret play, solved exactly by one program.

The learner publishes the no-swap-regret polytope plus one hand-picked
profile per opponent type.  The solver maximizes the prior-weighted
learner value of the picked profiles subject to no-regret, incentive
compatibility across types, and each type's Stackelberg floor.
"""

import numpy as np

from menuopt import (
    BimatrixGame,
    bilinear_value,
    grid_bruteforce_nr,
    nsr_baseline_value,
    optimal_no_regret_commitment,
)

game = BimatrixGame.from_json(open("demos/games/g1.json").read())

res = optimal_no_regret_commitment(game)
print("optimal value:", round(res.value, 6))
print("baseline (no-swap-regret only):", round(nsr_baseline_value(game), 6))
print("per-type Stackelberg floors:", np.round(res.stackelberg_values, 6))

w = res.assignment[0].weights.reshape(game.m, game.n)
print("\nassigned profile (rows A,B,C x cols R,S):\n", np.round(w, 4))
print("opponent's value at it:", round(bilinear_value(game.u_O(0), res.assignment[0]), 6))

# The mixture from the opening walkthrough (worth 5) is feasible here, so
# the optimum had to weakly beat it; it does, by nearly 2 utility points.
assert res.value >= 5.0 - 1e-9

# Sanity: an exhaustive lattice search over assignments can only do worse.
oracle = grid_bruteforce_nr(game, resolution=0.25)
print("\nlattice search at quarter resolution:", round(oracle, 6), "<=", round(res.value, 6))
