"""Games, strategy profiles, and regret menus.

The running example is a 3x2 game: the learner picks a row (A, B, C),
the opponent a column (R, S).  A correlated strategy profile (CSP) is a
distribution over the six pure pairs; it is the universal summary of
repeated play, and both players' average payoffs are linear in it.
"""

import numpy as np

from menuopt import (
    BimatrixGame,
    Csp,
    bilinear_value,
    no_regret_check,
    no_regret_menu,
    no_swap_regret_check,
)

game = BimatrixGame(
    u_L=np.array([[0.0, 3.0], [7.1, 2.1], [7.0, 1.0]]),
    types=((np.array([[0.0, 1.0], [0.0, 1.0], [3.0, 0.0]]), 1.0),),
)
print("learner payoffs:\n", game.u_L)
print("opponent payoffs:\n", game.u_O(0))

# A point mass on (A, S): the learner earns 3, the opponent 1.
as_pair = Csp.point_mass(0, 1, game.m, game.n)
print("\n(A,S): learner", bilinear_value(game.u_L, as_pair), " opponent", bilinear_value(game.u_O(0), as_pair))

# Half (C,R) + half (A,S) earns the learner 5 and the opponent 2.
mix = Csp.mix([(0.5, Csp.point_mass(2, 0, 3, 2)), (0.5, Csp.point_mass(0, 1, 3, 2))])
print("half/half: learner", bilinear_value(game.u_L, mix), " opponent", bilinear_value(game.u_O(0), mix))

# The mixture is no-regret: its value 5 beats the best row deviation.
menu = no_regret_menu(game)
devs = menu.normals @ mix.weights
print("\nper-row deviation gains:", np.round(devs, 3), "-> no regret?", no_regret_check(mix, game))

# But it is not swap-regret-free: moving only the (C,*) rounds onto row B
# trades 3.5 for 3.55.
print("no swap regret?", no_swap_regret_check(mix, game))

# Against a no-regret learner the opponent can induce any profile in the
# regret polytope; menus package such reachable sets as halfspace systems.
print("\nregret polytope has", menu.n_constraints, "constraints over", menu.dim, "pair weights")
