"""Independent ground truth for the solver pipeline.

Three unrelated routes to the answer live here: fixed-point value
iteration with pure saddle points, direct policy evaluation of a pure
stationary pair, and exhaustive complementary-support enumeration for
small square LCPs.  None of them shares code with the homotopy path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import MaxIterExceeded, NoPureSaddle, SizeGuardExceeded
from .game_model import AratGame, composed_reward, composed_transition

if TYPE_CHECKING:  # pragma: no cover
    from .vlcp_builder import VlcpSolution

log = logging.getLogger(__name__)

#: Largest LCP dimension the 2^n support enumeration will attempt.
ENUMERATION_GUARD = 20

#: Relative gap below which max-min and min-max are considered equal.
_SADDLE_TOL = 1e-9


@dataclass(frozen=True)
class GameSolution:
    """Value vector and pure stationary strategies (0-based actions)."""

    v: np.ndarray
    strategy_i: tuple[int, ...]
    strategy_ii: tuple[int, ...]
    iterations: int
    residual: float


def stage_matrix(game: AratGame, s: int, v: np.ndarray) -> np.ndarray:
    """Auxiliary one-shot matrix: reward plus discounted continuation."""
    m1, m2 = game.m1[s], game.m2[s]
    q = np.empty((m1, m2))
    for i in range(m1):
        for j in range(m2):
            q[i, j] = composed_reward(game, s, i, j) + game.beta * (
                composed_transition(game, s, i, j) @ v
            )
    return q


def pure_saddle(q: np.ndarray) -> tuple[float, int, int]:
    """Pure saddle point of a matrix, smallest-index tie-break.

    Raises NoPureSaddle when max-min != min-max over pure actions; this
    cannot happen for matrices with additively split entries.
    """
    row_min = q.min(axis=1)
    col_max = q.max(axis=0)
    i_star = int(np.argmax(row_min))
    j_star = int(np.argmin(col_max))
    maxmin = row_min[i_star]
    minmax = col_max[j_star]
    scale = 1.0 + max(abs(maxmin), abs(minmax))
    if abs(maxmin - minmax) > _SADDLE_TOL * scale:
        raise NoPureSaddle(
            f"max-min {maxmin!r} != min-max {minmax!r}; matrix has no pure "
            f"saddle point"
        )
    return float(maxmin), i_star, j_star


def value_iteration(game: AratGame, tol: float = 1e-10,
                    max_iter: int = 100_000) -> GameSolution:
    """Fixed-point iteration v <- per-state pure saddle of the stage matrix.

    Stops when the sup-norm step falls below tol * (1 - beta) / (2 beta),
    which bounds the distance to the fixed point by tol / 2.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    beta = game.beta
    threshold = tol * (1.0 - beta) / (2.0 * beta) if beta > 0 else tol
    v = np.zeros(game.d)
    for it in range(1, max_iter + 1):
        v_next = np.empty_like(v)
        for s in range(game.d):
            v_next[s], _, _ = pure_saddle(stage_matrix(game, s, v))
        step = float(np.max(np.abs(v_next - v)))
        v = v_next
        if step <= threshold:
            strategy_i, strategy_ii = [], []
            residual = 0.0
            for s in range(game.d):
                val, i_star, j_star = pure_saddle(stage_matrix(game, s, v))
                strategy_i.append(i_star)
                strategy_ii.append(j_star)
                residual = max(residual, abs(val - v[s]))
            return GameSolution(
                v=v,
                strategy_i=tuple(strategy_i),
                strategy_ii=tuple(strategy_ii),
                iterations=it,
                residual=residual,
            )
    raise MaxIterExceeded(f"no fixed point within {max_iter} sweeps")


def evaluate_pure_pair(game: AratGame, strategy_i: Sequence[int],
                       strategy_ii: Sequence[int]) -> np.ndarray:
    """Exact discounted value of a fixed pure stationary pair.

    Solves (I - beta P) v = r where row s of P is the composed transition
    under the pair's actions in state s.
    """
    d = game.d
    p = np.empty((d, d))
    r = np.empty(d)
    for s in range(d):
        i, j = strategy_i[s], strategy_ii[s]
        p[s] = composed_transition(game, s, i, j)
        r[s] = composed_reward(game, s, i, j)
    return np.linalg.solve(np.eye(d) - game.beta * p, r)


def enumerate_lcp(m: np.ndarray, q: np.ndarray,
                  guard: int = ENUMERATION_GUARD) -> list[tuple[np.ndarray, np.ndarray]]:
    """All solutions of ``w = M z + q, z, w >= 0, z circ w = 0`` by brute force.

    Walks every complementary support (z free on alpha, w zero on alpha),
    solves the induced square system, and keeps nonnegative solutions.
    Rank-deficient supports are skipped.  The result is deduplicated and
    lexicographically sorted, hence deterministic.
    """
    m = np.asarray(m, dtype=float)
    q = np.asarray(q, dtype=float)
    n = q.size
    if n > guard:
        raise SizeGuardExceeded(f"n={n} exceeds enumeration guard {guard}")
    feas_tol = 1e-10
    solutions: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    for mask in range(1 << n):
        alpha = [i for i in range(n) if mask >> i & 1]
        z = np.zeros(n)
        if alpha:
            sub = m[np.ix_(alpha, alpha)]
            rhs = -q[alpha]
            try:
                z_alpha = np.linalg.solve(sub, rhs)
            except np.linalg.LinAlgError:
                log.debug("support %s skipped: singular", alpha)
                continue
            if not np.all(np.isfinite(z_alpha)):
                continue
            # refuse wildly ill-conditioned supports
            if np.linalg.cond(sub) > 1e12:
                log.debug("support %s skipped: ill-conditioned", alpha)
                continue
            z[alpha] = z_alpha
        w = m @ z + q
        if z.min() < -feas_tol or w.min() < -feas_tol:
            continue
        z = np.where(np.abs(z) < feas_tol, 0.0, z)
        w = np.where(np.abs(w) < feas_tol, 0.0, w)
        key = tuple(np.round(z, 9)) + tuple(np.round(w, 9))
        solutions.setdefault(key, (z, w))
    return [solutions[k] for k in sorted(solutions)]


@dataclass(frozen=True)
class CertificateReport:
    """Per-check outcome of :func:`certify`."""

    value_match: bool
    ineq_player_i: bool
    ineq_player_ii: bool
    value_error: float
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.value_match and self.ineq_player_i and self.ineq_player_ii


def certify(game: AratGame, candidate: "VlcpSolution",
            tol: float = 1e-6) -> CertificateReport:
    """Check a candidate solution against the value-iteration oracle.

    Verifies the value vector to ``tol`` in sup norm, and both one-sided
    optimality inequality families for the candidate's pure strategies
    against the oracle value.
    """
    truth = value_iteration(game, tol=min(tol, 1e-8) * 0.01)
    v = truth.v
    violations: list[str] = []

    value_error = float(np.max(np.abs(np.asarray(candidate.value) - v)))
    value_match = value_error <= tol
    if not value_match:
        violations.append(
            f"value mismatch: sup-norm error {value_error!r} > {tol!r}"
        )

    ineq_i = True
    ineq_ii = True
    for s in range(game.d):
        j_star = candidate.strategy_ii[s]
        for i in range(game.m1[s]):
            lhs = composed_reward(game, s, i, j_star) + game.beta * (
                composed_transition(game, s, i, j_star) @ v
            )
            if lhs > v[s] + tol:
                ineq_i = False
                violations.append(
                    f"state {s + 1}: player-I deviation i={i + 1} attains "
                    f"{lhs!r} > value {v[s]!r}"
                )
        i_star = candidate.strategy_i[s]
        for j in range(game.m2[s]):
            lhs = composed_reward(game, s, i_star, j) + game.beta * (
                composed_transition(game, s, i_star, j) @ v
            )
            if lhs < v[s] - tol:
                ineq_ii = False
                violations.append(
                    f"state {s + 1}: player-II deviation j={j + 1} attains "
                    f"{lhs!r} < value {v[s]!r}"
                )
    return CertificateReport(
        value_match=value_match,
        ineq_player_i=ineq_i,
        ineq_player_ii=ineq_ii,
        value_error=value_error,
        violations=tuple(violations),
    )
