"""Approachability testing for candidate menus, cuts, and mass repair.

The tester works in utility space: a candidate menu with per-type
thresholds c is a valid menu iff the downward-closed orthant
{u : u_i <= c_i} can be forced by the learner, which holds iff every
supporting halfspace (direction a in the k-simplex) satisfies
min_x max_y sum_s a_s u_{O,s}(x, y) <= a . c.  A finite direction net
makes the check decidable up to an additive delta:

  * net spacing is delta / (4 * p_max) in L1 and the pass margin is
    delta / 2.  The map a -> (value - a . c) is 2 * p_max-Lipschitz in
    L1, so a direction violated by more than delta implies some net
    direction violated by more than delta / 2;
  * all net directions passing therefore certifies that the menu with
    thresholds c + delta is valid ("approachable after expansion");
  * a failing net direction yields an opponent mix y* under which no
    learner response lands inside the menu, a sound invalidity proof.

The action-perspective oracle has identical semantics for candidate
menus (supporting cuts are nonnegative combinations of the k defining
halfspaces), so it is exposed as an alias of the same engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, comb
from typing import List, Optional, Tuple

import numpy as np

from . import lp
from .core import BimatrixGame, Csp, CspAssignment
from .errors import CertificateInvalid, GridTooLarge, InvalidInput
from .menus import candidate_utility_set

_NET_CAP = 2_000_000  # refuse absurd nets instead of hanging


def simplex_lattice(dim: int, denominator: int) -> np.ndarray:
    """All points of the dim-simplex with coordinates in multiples of 1/D.

    Rows are ordered lexicographically by composition, largest first in
    the leading coordinate, so grids and certificates are reproducible.
    """
    if dim < 1 or denominator < 1:
        raise InvalidInput("dimension and denominator must be positive")
    count = comb(denominator + dim - 1, dim - 1)
    if count > _NET_CAP:
        raise GridTooLarge(f"lattice would have {count} points")
    out = np.zeros((count, dim))
    idx = 0

    def rec(prefix: List[int], remaining: int, slots: int):
        nonlocal idx
        if slots == 1:
            out[idx, : len(prefix)] = prefix
            out[idx, len(prefix)] = remaining
            idx += 1
            return
        for v in range(remaining, -1, -1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], denominator, dim)
    return out / denominator


@dataclass(frozen=True)
class DirectionNet:
    """Finite cover of the k-simplex with L1 mesh at most `spacing`."""

    dim: int
    spacing: float
    points: np.ndarray

    @staticmethod
    def build(dim: int, spacing: float) -> "DirectionNet":
        if spacing <= 0:
            raise InvalidInput("net spacing must be positive")
        if dim == 1:
            return DirectionNet(1, spacing, np.ones((1, 1)))
        # Largest-remainder rounding onto the lattice with denominator D has
        # worst-case L1 error 2*floor(dim/2)*ceil(dim/2)/(dim*D).
        worst = 2 * (dim // 2) * ((dim + 1) // 2) / dim
        D = max(1, ceil(worst / spacing))
        return DirectionNet(dim, spacing, simplex_lattice(dim, D))


@dataclass(frozen=True)
class ApproachVerdict:
    """Either "the delta-expanded menu is forceable" or a refutation.

    When not approachable, `direction` is the violated supporting
    direction and `certificate_y` an opponent mix with
    u(x, y) outside the menu for every learner x.
    """

    approachable: bool
    delta: float
    direction: Optional[np.ndarray] = None
    certificate_y: Optional[np.ndarray] = None

    @property
    def outcome(self) -> str:
        return f"ApproachableExpanded({self.delta})" if self.approachable else "NotApproachable"


def halfspace_value(game: BimatrixGame, a: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """Forceable level of the direction-a halfspace, with both strategies.

    Returns (value, x, y) for the zero-sum game on M_a = sum_s a_s u_{O,s}
    with the learner minimizing; the halfspace {u : a . u <= b} can be
    forced iff value <= b.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (game.k,) or np.min(a) < -1e-12 or abs(a.sum() - 1.0) > 1e-9:
        raise InvalidInput("direction must lie on the type simplex")
    M_a = np.tensordot(a, game.opponent_payoffs, axes=(0, 0))
    return lp.zero_sum_value(M_a)


def _net_values(game: BimatrixGame, directions: np.ndarray) -> np.ndarray:
    """min_x max_y values of M_a for every direction row, vectorized."""
    stacks = np.tensordot(directions, game.opponent_payoffs, axes=(1, 0))  # (N, m, n)
    if game.n == 2:
        return lp.zero_sum_value_batch2(stacks)
    if game.m == 2:
        return -lp.zero_sum_value_batch2(-np.swapaxes(stacks, 1, 2))
    return np.array([lp.zero_sum_value(M)[0] for M in stacks])


def verdict_for_thresholds(
    game: BimatrixGame, c: np.ndarray, delta: float
) -> ApproachVerdict:
    """Tester core over raw per-type utility thresholds c."""
    if delta <= 0:
        raise InvalidInput("delta must be positive")
    c = np.asarray(c, dtype=float)
    net = DirectionNet.build(game.k, delta / (4.0 * game.p_max))
    values = _net_values(game, net.points)
    slack = net.points @ c + delta / 2.0 - values
    bad = np.nonzero(slack < -1e-12)[0]
    if bad.size == 0:
        return ApproachVerdict(True, delta)
    a = net.points[int(bad[0])]
    M_a = np.tensordot(a, game.opponent_payoffs, axes=(0, 0))
    _, _, y = lp.zero_sum_value(M_a)
    return ApproachVerdict(False, delta, direction=a, certificate_y=y)


def test_assignment_valid(
    assign: CspAssignment, game: BimatrixGame, delta: float
) -> ApproachVerdict:
    """Decide approximately whether the candidate menu of `assign` is valid.

    Passing certifies that the eps=delta candidate menu is a valid menu;
    failing returns the first violated net direction (in net order) plus
    its opponent certificate.
    """
    c = candidate_utility_set(assign, 0.0, game).thresholds
    return verdict_for_thresholds(game, c, delta)


# Action-perspective oracle: identical semantics for candidate menus.
test_assignment_valid_action_perspective = test_assignment_valid

# not a pytest case, despite the name
test_assignment_valid.__test__ = False
test_assignment_valid_action_perspective.__test__ = False


def direction_slacks(
    assign: CspAssignment, game: BimatrixGame, delta: float
) -> np.ndarray:
    """Per-net-direction pass margins a . c + delta/2 - value (diagnostics)."""
    c = candidate_utility_set(assign, 0.0, game).thresholds
    net = DirectionNet.build(game.k, delta / (4.0 * game.p_max))
    return net.points @ c + delta / 2.0 - _net_values(game, net.points)


def separating_hyperplane(
    assign: CspAssignment, game: BimatrixGame, certificate_y: np.ndarray
) -> Tuple[np.ndarray, float, float]:
    """Turn an invalidity certificate into a cut in assignment space.

    Solves the zero-sum game between a type-weight vector h on the
    k-simplex and a learner mix x with payoff
    sum_i h_i (u_{O,i}(x, y*) - u_{O,i}(phi_i)).  A positive value
    (the margin) certifies the cut

        sum_i h_i u_{O,i}(phi'_i) >= offset = sum_i h_i u_{O,i}(phi_i),

    which every assignment with a valid candidate menu satisfies with
    margin-sized slack while `assign` sits exactly on the boundary.
    Among optimal h the lexicographically largest (lowest index favored)
    is returned for determinism.
    """
    c = candidate_utility_set(assign, 0.0, game).thresholds
    return separator_for_thresholds(game, c, certificate_y)


def separator_for_thresholds(
    game: BimatrixGame, c: np.ndarray, certificate_y: np.ndarray
) -> Tuple[np.ndarray, float, float]:
    """Separator core over raw per-type utility thresholds c."""
    y = np.asarray(certificate_y, dtype=float)
    if y.shape != (game.n,):
        raise InvalidInput("certificate has wrong dimension")
    c = np.asarray(c, dtype=float)
    G = np.array([game.u_O(i) @ y - c[i] for i in range(game.k)])  # (k, m)
    neg_value, h, _ = lp.zero_sum_value(-G)
    margin = -neg_value
    if margin <= 1e-9:
        raise CertificateInvalid(f"certificate has non-positive margin {margin}")
    h = _lexicographic_h(G, margin)
    offset = float(h @ c)
    return h, offset, margin


def _lexicographic_h(G: np.ndarray, margin: float) -> np.ndarray:
    """Lexicographically refine h over {h in simplex : G^T h >= margin}."""
    k, m = G.shape
    fixed: List[Tuple[int, float]] = []
    h = np.zeros(k)
    for lead in range(k):
        cons = [(np.ones(k), lp.EQ, 1.0)]
        for i in range(k):
            e = np.zeros(k)
            e[i] = 1.0
            cons.append((e, lp.GE, 0.0))
        for col in range(m):
            cons.append((G[:, col], lp.GE, margin - 1e-9))
        for idx, val in fixed:
            e = np.zeros(k)
            e[idx] = 1.0
            cons.append((e, lp.GE, val - 1e-9))
        obj = np.zeros(k)
        obj[lead] = 1.0
        sol = lp.solve_lp(lp.LinearProgram(obj, cons))
        if not sol.is_optimal:
            raise CertificateInvalid("lexicographic refinement lost feasibility")
        fixed.append((lead, sol.objective_value))
        h = np.maximum(sol.point, 0.0)
    return h / h.sum()


def water_fill_repair(
    assign: CspAssignment, game: BimatrixGame, eps: float
) -> CspAssignment:
    """Shift up to eps/k mass per type onto its favorite pure pair.

    For each type, mass is drained from pairs in increasing order of that
    type's payoff (never below zero) and deposited on the argmax pair,
    raising the type's own threshold and hence only relaxing its
    candidate-menu constraint.
    """
    if not (0.0 < eps <= 1.0):
        raise InvalidInput("eps must lie in (0, 1]")
    if len(assign) != game.k:
        raise InvalidInput("assignment size does not match the game")
    budget = eps / game.k
    repaired = []
    for i in range(game.k):
        u = game.u_O(i).ravel()
        w = assign[i].weights.copy()
        top = int(np.lexsort((np.arange(u.size), -u))[0])  # argmax, lowest index
        order = np.lexsort((np.arange(u.size), u))  # increasing u, then index
        moved = 0.0
        for j in order:
            if j == top:
                continue
            if moved >= budget - 1e-15:
                break
            take = min(w[j], budget - moved)
            w[j] -= take
            moved += take
        w[top] += moved
        repaired.append(Csp(w))
    return CspAssignment(tuple(repaired))


def min_positive_gap(u: np.ndarray) -> float:
    """Smallest gap between distinct entries of u; 1.0 if all entries tie."""
    vals = np.unique(np.asarray(u, dtype=float).ravel())
    if vals.size < 2:
        return 1.0
    return float(np.min(np.diff(vals)))
