"""Dense two-phase primal simplex for equality-form LPs with x >= 0.

Sized for the recovery experiments (up to a few hundred columns), where exact
vertex solutions matter for uniqueness detection, so this is a simplex and
not an interior-point method.  Pricing is Dantzig (most negative reduced
cost) with a switch to Bland's rule after 10*(r+c) iterations to rule out
cycling; ratio-test ties always go to the lowest variable index, which keeps
pivot sequences bit-reproducible.  The basis inverse is kept explicitly and
refreshed from scratch every 100 pivots or when the feasibility residual
drifts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["LPStatus", "StandardFormLP", "LPSolution", "solve"]

_REFACTOR_EVERY = 100
_DRIFT_TOL = 1e-10
_PIVOT_TOL = 1e-11


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class StandardFormLP:
    """min cost @ x  subject to  constraint_matrix @ x = rhs,  x >= 0."""

    constraint_matrix: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.constraint_matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        c = np.asarray(self.cost, dtype=float)
        if a.ndim != 2 or b.shape != (a.shape[0],) or c.shape != (a.shape[1],):
            raise ValueError("inconsistent LP shapes")
        if not (np.isfinite(a).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "constraint_matrix", a)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "cost", c)


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    x: np.ndarray
    objective: float
    iterations: int
    # multipliers of the final basis; used by dual-bound spot checks
    duals: np.ndarray | None = field(default=None, repr=False)


class _Core:
    """Simplex iterations over an explicit working matrix [A | artificials]."""

    def __init__(self, a, b, bland_after):
        self.a = a
        self.b = b
        self.r = a.shape[0]
        self.bland_after = bland_after
        self.iterations = 0
        self.pivots_since_refactor = 0
        self.basis = None
        self.binv = None
        self.xb = None

    def set_basis(self, basis):
        self.basis = np.array(basis, dtype=int)
        self.refactor()

    def refactor(self):
        self.binv = np.linalg.inv(self.a[:, self.basis])
        self.xb = self.binv @ self.b
        self.pivots_since_refactor = 0

    def residual(self):
        return float(np.max(np.abs(self.a[:, self.basis] @ self.xb - self.b), initial=0.0))

    def run(self, cost, allowed, max_iter, opt_tol):
        """Iterate to optimality of `cost` over columns where `allowed`."""
        while True:
            if self.iterations >= max_iter:
                return LPStatus.ITERATION_LIMIT
            y = cost[self.basis] @ self.binv
            reduced = cost - y @ self.a
            reduced[~allowed] = np.inf
            reduced[self.basis] = np.inf
            if self.iterations < self.bland_after:
                j = int(np.argmin(reduced))
                if reduced[j] >= -opt_tol:
                    return LPStatus.OPTIMAL
            else:
                neg = np.flatnonzero(reduced < -opt_tol)
                if neg.size == 0:
                    return LPStatus.OPTIMAL
                j = int(neg[0])
            d = self.binv @ self.a[:, j]
            pos = d > _PIVOT_TOL
            if not pos.any():
                return LPStatus.UNBOUNDED
            ratios = np.full(self.r, np.inf)
            ratios[pos] = np.maximum(self.xb[pos], 0.0) / d[pos]
            rmin = ratios.min()
            ties = np.flatnonzero(ratios <= rmin * (1.0 + 1e-12) + 1e-300)
            p = int(ties[np.argmin(self.basis[ties])])
            self.pivot(p, j, d)

    def pivot(self, p, j, d):
        piv = d[p]
        theta = self.xb[p] / piv
        self.xb -= theta * d
        self.xb[p] = theta
        self.binv[p, :] /= piv
        others = np.arange(self.r) != p
        self.binv[others, :] -= np.outer(d[others], self.binv[p, :])
        self.basis[p] = j
        self.iterations += 1
        self.pivots_since_refactor += 1
        if self.pivots_since_refactor >= _REFACTOR_EVERY or (
            self.iterations % 20 == 0 and self.residual() > _DRIFT_TOL * (1.0 + np.abs(self.b).max(initial=0.0))
        ):
            self.refactor()


def solve(lp: StandardFormLP, feas_tol: float = 1e-9, max_iter: int | None = None) -> LPSolution:
    """Two-phase primal simplex; never reports an infeasible point as Optimal."""
    a0 = lp.constraint_matrix
    b0 = lp.rhs
    c0 = lp.cost
    r, c = a0.shape
    if max_iter is None:
        max_iter = 50 * (r + c)
    bland_after = 10 * (r + c)

    flip = b0 < 0
    a = a0.copy()
    a[flip] *= -1.0
    b = b0.copy()
    b[flip] *= -1.0

    work = np.hstack([a, np.eye(r)])
    core = _Core(work, b, bland_after)
    core.set_basis(np.arange(c, c + r))

    b_scale = 1.0 + float(np.abs(b).max(initial=0.0))

    # phase 1: drive the artificial mass to zero
    phase1_cost = np.concatenate([np.zeros(c), np.ones(r)])
    allowed = np.ones(c + r, dtype=bool)
    status = core.run(phase1_cost, allowed, max_iter, opt_tol=1e-9)
    if status is LPStatus.ITERATION_LIMIT:
        return LPSolution(LPStatus.ITERATION_LIMIT, np.zeros(c), math.nan, core.iterations)
    art_mass = float(phase1_cost[core.basis] @ core.xb)
    if art_mass > feas_tol * b_scale:
        return LPSolution(LPStatus.INFEASIBLE, np.zeros(c), math.nan, core.iterations)

    # pivot leftover artificials out where a structural column can replace them
    for p in np.flatnonzero(core.basis >= c):
        row = core.binv[p, :] @ work[:, :c]
        cand = np.flatnonzero(np.abs(row) > 1e-8)
        cand = cand[~np.isin(cand, core.basis)]
        if cand.size:
            j = int(cand[0])
            d = core.binv @ work[:, j]
            core.pivot(p, j, d)
    core.refactor()

    # phase 2 on the real cost; artificials may not re-enter
    allowed = np.concatenate([np.ones(c, dtype=bool), np.zeros(r, dtype=bool)])
    phase2_cost = np.concatenate([c0, np.zeros(r)])
    status = core.run(phase2_cost, allowed, max_iter, opt_tol=1e-9)
    if status is LPStatus.ITERATION_LIMIT:
        return LPSolution(LPStatus.ITERATION_LIMIT, np.zeros(c), math.nan, core.iterations)

    core.refactor()
    x = np.zeros(c)
    struct = core.basis < c
    x[core.basis[struct]] = core.xb[struct]
    resid = float(np.max(np.abs(a0 @ x - b0), initial=0.0))
    if status is LPStatus.OPTIMAL and (resid > feas_tol * b_scale or x.min(initial=0.0) < -feas_tol):
        # numerically broken basis: refuse to call it optimal
        return LPSolution(LPStatus.ITERATION_LIMIT, x, math.nan, core.iterations)
    duals = phase2_cost[core.basis] @ core.binv
    duals[flip] *= -1.0
    objective = float(c0 @ x) if status is LPStatus.OPTIMAL else math.nan
    if status is LPStatus.UNBOUNDED:
        objective = -math.inf
    return LPSolution(status, x, objective, core.iterations, duals=duals)
