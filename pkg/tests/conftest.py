import numpy as np
import pytest

from menuopt.core import BimatrixGame


# 3x2 running example: learner rows A, B, C; opponent columns R, S.
# Entries are (u_L, u_O) = A:(0,0),(3,1)  B:(7.1,0),(2.1,1)  C:(7,3),(1,0).
G1_UL = np.array([[0.0, 3.0], [7.1, 2.1], [7.0, 1.0]])
G1_UO = np.array([[0.0, 1.0], [0.0, 1.0], [3.0, 0.0]])

# Pair indices in the flattened row-major profile.
AR, AS, BR, BS, CR, CS = 0, 1, 2, 3, 4, 5


@pytest.fixture(scope="session")
def g1() -> BimatrixGame:
    return BimatrixGame(G1_UL, ((G1_UO, 1.0),))


def random_game(rng: np.random.Generator, m: int, n: int, k: int) -> BimatrixGame:
    u_L = rng.uniform(-1.0, 1.0, size=(m, n))
    alphas = rng.dirichlet(np.ones(k))
    types = tuple(
        (rng.uniform(-1.0, 1.0, size=(m, n)), float(a)) for a in alphas
    )
    return BimatrixGame(u_L, types)


def random_csp(rng: np.random.Generator, mn: int):
    from menuopt.core import Csp

    return Csp(rng.dirichlet(np.ones(mn)))
