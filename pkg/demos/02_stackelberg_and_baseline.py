"""Per-type Stackelberg leader values and the no-swap-regret baseline.

When the learner runs any no-swap-regret algorithm, each opponent type's
best response is to play its Stackelberg leader strategy every round, so
the learner's value is pinned down by those equilibria.
"""

import json

import numpy as np

from menuopt import BimatrixGame, nsr_baseline_value, type_leader_values

game = BimatrixGame.from_json(open("demos/games/g1.json").read())

values, csps = type_leader_values(game)
for i, (v, csp) in enumerate(zip(values, csps)):
    mat = csp.weights.reshape(game.m, game.n)
    li, oj = np.unravel_index(int(np.argmax(mat)), mat.shape)
    print(f"type {i}: leader value {v:.4f}, outcome (learner row {li}, opponent col {oj})")

# Committing to no-swap-regret play hands each type its leader value and
# leaves the learner with the payoff at those outcomes.
print("learner value under a no-swap-regret commitment:", round(nsr_baseline_value(game), 6))

# The same numbers drive the solvers: the leader values become per-type
# participation floors in the commitment programs.
print("game document:", json.dumps(json.loads(game.to_json()))[:80], "...")
