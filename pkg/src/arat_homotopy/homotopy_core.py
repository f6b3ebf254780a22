"""Interior homotopy between a known point and the complementarity system.

For a square problem (A, q) and a strictly feasible anchor
u0 = (x0, y1_0, y2_0), the map H(u, t) deforms, as t runs from 1 to 0,
a system solved exactly by u0 into one whose solutions solve the LCP:

    block 1:  (1-t) [(A + A^T) x + q - y1 - A^T y2] + t (x - x0)
    block 2:  Y1 x - t Y1_0 x0 + (1-t) X (A x + q)
    block 3:  Y2 (A x + q) - t Y2_0 (A x0 + q)

with X, Y1, Y2 the diagonal matrices of x, y1, y2.  At t = 0 nonnegative
solutions force the componentwise products x * (A x + q) to vanish.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NoInteriorPointFound
from .vlcp_builder import SquareLcp

log = logging.getLogger(__name__)

#: Small-variable level used by the feasibility heuristic.
_EPS_SMALL = 1e-2
#: Doubling budget of the feasibility heuristic.
_MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class HomotopyPoint:
    """A candidate location (x, y1, y2) together with the parameter t."""

    x: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    t: float

    def __post_init__(self) -> None:
        for name in ("x", "y1", "y2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "t", float(self.t))

    @property
    def u(self) -> np.ndarray:
        """The stacked 3n coordinate vector (without t)."""
        return np.concatenate([self.x, self.y1, self.y2])

    @property
    def v(self) -> np.ndarray:
        """The stacked 3n+1 vector including t, the tracer's unknown."""
        return np.concatenate([self.x, self.y1, self.y2, [self.t]])

    @classmethod
    def from_v(cls, v: np.ndarray) -> "HomotopyPoint":
        n = (v.size - 1) // 3
        return cls(x=v[:n], y1=v[n:2 * n], y2=v[2 * n:3 * n], t=float(v[-1]))


@dataclass(frozen=True)
class HomotopyInstance:
    """Problem data plus a strictly interior anchor point.

    Requires x0 > 0, y1_0 > 0, y2_0 > 0 and A x0 + q > 0 strictly.
    """

    A: np.ndarray
    q: np.ndarray
    x0: np.ndarray
    y1_0: np.ndarray
    y2_0: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.A, dtype=float)
        vecs = {}
        for name in ("q", "x0", "y1_0", "y2_0"):
            vecs[name] = np.asarray(getattr(self, name), dtype=float)
        n = vecs["q"].size
        if a.shape != (n, n) or any(v.size != n for v in vecs.values()):
            raise ValueError("A must be n x n and all vectors length n")
        y0 = a @ vecs["x0"] + vecs["q"]
        if (vecs["x0"].min() <= 0.0 or vecs["y1_0"].min() <= 0.0
                or vecs["y2_0"].min() <= 0.0 or y0.min() <= 0.0):
            raise ValueError(
                "anchor must be strictly interior: x0 > 0, y1_0 > 0, "
                "y2_0 > 0 and A x0 + q > 0"
            )
        a.setflags(write=False)
        object.__setattr__(self, "A", a)
        for name, v in vecs.items():
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def y0(self) -> np.ndarray:
        """Slack at the anchor, A x0 + q."""
        return self.A @ self.x0 + self.q

    @property
    def u0(self) -> HomotopyPoint:
        return HomotopyPoint(x=self.x0, y1=self.y1_0, y2=self.y2_0, t=1.0)

    @classmethod
    def from_lcp(cls, lcp: SquareLcp, x0: np.ndarray,
                 y1_0: np.ndarray | None = None,
                 y2_0: np.ndarray | None = None) -> "HomotopyInstance":
        n = lcp.n
        e = np.ones(n)
        return cls(A=lcp.M, q=lcp.q, x0=np.asarray(x0, dtype=float),
                   y1_0=e if y1_0 is None else y1_0,
                   y2_0=e if y2_0 is None else y2_0)


def eval_H(inst: HomotopyInstance, p: HomotopyPoint) -> np.ndarray:
    """The stacked 3n residual of the deformation map at (u, t)."""
    a, q = inst.A, inst.q
    x, y1, y2, t = p.x, p.y1, p.y2, p.t
    if x.size != inst.n:
        raise ValueError("point dimension does not match the instance")
    ax_q = a @ x + q
    b1 = (1.0 - t) * ((a + a.T) @ x + q - y1 - a.T @ y2) + t * (x - inst.x0)
    b2 = y1 * x - t * (inst.y1_0 * inst.x0) + (1.0 - t) * (x * ax_q)
    b3 = y2 * ax_q - t * (inst.y2_0 * inst.y0)
    return np.concatenate([b1, b2, b3])


def jac_u(inst: HomotopyInstance, p: HomotopyPoint) -> np.ndarray:
    """Exact 3n x 3n derivative with respect to (x, y1, y2)."""
    a = inst.A
    n = inst.n
    x, y1, y2, t = p.x, p.y1, p.y2, p.t
    ax_q = a @ x + inst.q
    eye = np.eye(n)
    top = np.hstack([
        (1.0 - t) * (a + a.T) + t * eye,
        -(1.0 - t) * eye,
        -(1.0 - t) * a.T,
    ])
    mid = np.hstack([
        np.diag(y1) + (1.0 - t) * (np.diag(ax_q) + np.diag(x) @ a),
        np.diag(x),
        np.zeros((n, n)),
    ])
    bot = np.hstack([
        np.diag(y2) @ a,
        np.zeros((n, n)),
        np.diag(ax_q),
    ])
    return np.vstack([top, mid, bot])


def jac_t(inst: HomotopyInstance, p: HomotopyPoint) -> np.ndarray:
    """Exact 3n derivative with respect to t."""
    a = inst.A
    x, y1, y2 = p.x, p.y1, p.y2
    ax_q = a @ x + inst.q
    b1 = (x - inst.x0) - ((a + a.T) @ x + inst.q - y1 - a.T @ y2)
    b2 = -(inst.y1_0 * inst.x0) - x * ax_q
    b3 = -(inst.y2_0 * inst.y0)
    return np.concatenate([b1, b2, b3])


def jac_full(inst: HomotopyInstance, p: HomotopyPoint) -> np.ndarray:
    """Wide 3n x (3n+1) derivative with respect to (x, y1, y2, t)."""
    return np.hstack([jac_u(inst, p), jac_t(inst, p)[:, None]])


def jac_u0(inst: HomotopyInstance, p: HomotopyPoint) -> tuple[np.ndarray, float]:
    """Derivative with respect to the anchor, and its closed-form determinant.

    The matrix is block lower triangular with diagonal blocks -tI, -tX0,
    -tY0, so its determinant is (-1)^(3n) t^(3n) prod(x0_i * y0_i) with
    y0 = A x0 + q.
    """
    n = inst.n
    t = p.t
    zero = np.zeros((n, n))
    j0 = np.vstack([
        np.hstack([-t * np.eye(n), zero, zero]),
        np.hstack([-t * np.diag(inst.y1_0), -t * np.diag(inst.x0), zero]),
        np.hstack([-t * np.diag(inst.y2_0) @ inst.A, zero,
                   -t * np.diag(inst.y0)]),
    ])
    det = float((-1.0) ** (3 * n) * t ** (3 * n) * np.prod(inst.x0 * inst.y0))
    return j0, det


def is_strictly_feasible(m: np.ndarray, q: np.ndarray, x: np.ndarray) -> bool:
    """x > 0 and M x + q > 0, both strictly."""
    x = np.asarray(x, dtype=float)
    return bool(x.min() > 0.0 and (m @ x + q).min() > 0.0)


def find_interior_point(lcp: SquareLcp, hint: np.ndarray | None = None) -> np.ndarray:
    """A strictly feasible start x0 > 0 with M x0 + q > 0.

    Tries, in order: the caller's hint; the uniform small vector (covers
    q > 0); a structured schedule that keeps the first half of the blocks
    (the eta copies) at a small level and doubles the second half (the xi
    copies) from max(1, 4/3 max|q|).  The schedule exploits that the xi
    columns of a game-built matrix carry the dominant positive identity
    part of the player-I rows.
    """
    m, q, n = lcp.M, lcp.q, lcp.n
    if hint is not None:
        hint = np.asarray(hint, dtype=float)
        if hint.size != n:
            raise ValueError("hint has wrong dimension")
        if is_strictly_feasible(m, q, hint):
            return hint
        log.info("interior-point hint rejected: not strictly feasible")

    x = np.full(n, _EPS_SMALL)
    if is_strictly_feasible(m, q, x):
        return x

    half = len(lcp.J) // 2
    xi_rows = [p for rng in lcp.J[half:] for p in rng]
    k = max(1.0, (4.0 / 3.0) * float(np.abs(q).max()))
    for _ in range(_MAX_DOUBLINGS + 1):
        x = np.full(n, _EPS_SMALL)
        x[xi_rows] = k
        if is_strictly_feasible(m, q, x):
            return x
        k *= 2.0
    raise NoInteriorPointFound(
        f"no strictly feasible point after {_MAX_DOUBLINGS} doublings"
    )
