"""Monte Carlo verification harness for the exact probabilities.

Random Gaussian systems are drawn from counter-based Philox streams keyed by
(seed, trial index), so every trial is reproducible in isolation and runs can
be split across any number of workers without changing a single bit of the
aggregate: the reduction is integer failure counting.

Recovery and the face-survival / null-space condition checks are all phrased
as equality-form LPs for the dense simplex solver; any non-optimal solver
outcome is tallied as a per-trial solver failure and excluded from the rate's
denominator.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exactprob import ProblemDims, Variant
from .linprog import LPStatus, StandardFormLP, solve

__all__ = [
    "TrialConfig",
    "ErrorRateEstimate",
    "SolverFailure",
    "wilson_interval",
    "gen_instance",
    "recover_positive",
    "recover_standard",
    "face_survival_trial",
    "nullspace_failure_check",
    "estimate",
]

_MASK64 = (1 << 64) - 1

# 95% two-sided normal quantile, used for the reported Wilson interval
_Z95 = 1.959963984540054


class SolverFailure(Exception):
    """The LP solver did not return a usable optimum for this trial."""


@dataclass(frozen=True)
class TrialConfig:
    dims: ProblemDims
    variant: Variant
    trials: int
    seed: int
    magnitude_low: float = 0.5
    magnitude_high: float = 1.5
    success_tol: float = 1e-6

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0.0 < self.magnitude_low <= self.magnitude_high:
            raise ValueError("need 0 < magnitude_low <= magnitude_high")
        if self.success_tol <= 0:
            raise ValueError("success_tol must be positive")


@dataclass(frozen=True)
class ErrorRateEstimate:
    """failures/trials with a 95% Wilson interval; trials excludes solver failures."""

    failures: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    solver_failures: int = 0
    flagged: bool = False


def wilson_interval(failures: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = failures / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def gen_instance(
    dims: ProblemDims,
    trial_index: int,
    seed: int,
    magnitude_low: float = 0.5,
    magnitude_high: float = 1.5,
):
    """One random instance (A, x_true, y) from the (seed, trial) Philox stream.

    The support sits on the first k coordinates with positive magnitudes;
    recovery success depends only on the support/sign pattern, so this loses
    no generality while keeping trials order-independent and bit-reproducible.
    """
    key = np.array([seed & _MASK64, trial_index & _MASK64], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    a = rng.standard_normal((dims.m, dims.n))
    x_true = np.zeros(dims.n)
    x_true[: dims.k] = rng.uniform(magnitude_low, magnitude_high, dims.k)
    return a, x_true, a @ x_true


def _solved(lp: StandardFormLP) -> np.ndarray:
    sol = solve(lp)
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"LP ended with status {sol.status.value}")
    return sol.x


def recover_positive(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-l1 nonnegative solution of a @ x = y (cost is all ones)."""
    n = a.shape[1]
    return _solved(StandardFormLP(a, y, np.ones(n)))


def recover_standard(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-l1 solution of a @ x = y via the positive/negative split."""
    n = a.shape[1]
    lp = StandardFormLP(np.hstack([a, -a]), y, np.ones(2 * n))
    z = _solved(lp)
    return z[:n] - z[n:]


def face_survival_trial(a: np.ndarray, x_true: np.ndarray, success_tol: float = 1e-6) -> bool:
    """Whether the support face of x_true survives projection by a.

    The survival event is exactly "no feasible point of the projected face
    carries mass off the support": maximize off-support mass at fixed total
    mass; the face survives iff that maximum is zero.
    """
    supp = x_true > 0
    if supp.all():
        return True
    rows = np.vstack([a, np.ones(a.shape[1])])
    rhs = np.concatenate([a @ x_true, [x_true.sum()]])
    cost = np.where(supp, 0.0, -1.0)
    sol = solve(StandardFormLP(rows, rhs, cost))
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"survival LP ended with status {sol.status.value}")
    return -sol.objective <= success_tol


def nullspace_failure_check(
    a: np.ndarray,
    k: int,
    variant: Variant = Variant.STANDARD_L1,
    success_tol: float = 1e-6,
) -> bool:
    """Deterministic failure condition on the null space of a.

    Failure holds iff some w with a @ w = 0 puts at least as much mass on
    -sum(w[:k]) as the off-support l1 mass; normalizing -sum(w[:k]) = 1 turns
    the check into "is the minimal off-support mass <= 1".  An infeasible
    normalization means no witness with nonzero on-support mass exists, which
    for generic a is a no-failure.
    """
    m, n = a.shape
    off = n - k
    if variant in (Variant.STANDARD_L1, Variant.CROSSPOLYTOPE):
        # columns: w+ (n), w- (n), t (off), slack1 (off), slack2 (off)
        cols = 2 * n + 3 * off
        rows = m + 1 + 2 * off
        mat = np.zeros((rows, cols))
        mat[:m, :n] = a
        mat[:m, n : 2 * n] = -a
        mat[m, :k] = -1.0
        mat[m, n : n + k] = 1.0
        for i in range(off):
            # w_i + t_i - s1_i = 0   (w_i >= -t_i)
            mat[m + 1 + i, k + i] = 1.0
            mat[m + 1 + i, n + k + i] = -1.0
            mat[m + 1 + i, 2 * n + i] = 1.0
            mat[m + 1 + i, 2 * n + off + i] = -1.0
            # t_i - w_i - s2_i = 0   (w_i <= t_i)
            mat[m + 1 + off + i, k + i] = -1.0
            mat[m + 1 + off + i, n + k + i] = 1.0
            mat[m + 1 + off + i, 2 * n + i] = 1.0
            mat[m + 1 + off + i, 2 * n + 2 * off + i] = -1.0
        rhs = np.zeros(rows)
        rhs[m] = 1.0
        cost = np.zeros(cols)
        cost[2 * n : 2 * n + off] = 1.0
    elif variant in (Variant.POSITIVE_L1, Variant.POSITIVE_SIMPLEX):
        # columns: w+ (k), w- (k), w_off (off, already >= 0)
        cols = 2 * k + off
        rows = m + 1
        mat = np.zeros((rows, cols))
        mat[:m, :k] = a[:, :k]
        mat[:m, k : 2 * k] = -a[:, :k]
        mat[:m, 2 * k :] = a[:, k:]
        mat[m, :k] = -1.0
        mat[m, k : 2 * k] = 1.0
        rhs = np.zeros(rows)
        rhs[m] = 1.0
        cost = np.zeros(cols)
        cost[2 * k :] = 1.0
    else:
        raise ValueError(f"unsupported variant {variant!r}")
    sol = solve(StandardFormLP(mat, rhs, cost))
    if sol.status is LPStatus.INFEASIBLE:
        return False
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"null-space LP ended with status {sol.status.value}")
    return sol.objective <= 1.0 + success_tol


def _recovery_failed(x_hat: np.ndarray, x_true: np.ndarray, tol: float) -> bool:
    scale = max(1.0, float(np.abs(x_true).max(initial=0.0)))
    return float(np.abs(x_hat - x_true).max(initial=0.0)) > tol * scale


def _run_trial(cfg: TrialConfig, idx: int) -> bool:
    a, x_true, y = gen_instance(cfg.dims, idx, cfg.seed, cfg.magnitude_low, cfg.magnitude_high)
    if cfg.variant is Variant.POSITIVE_L1:
        return _recovery_failed(recover_positive(a, y), x_true, cfg.success_tol)
    if cfg.variant in (Variant.STANDARD_L1, Variant.CROSSPOLYTOPE):
        return _recovery_failed(recover_standard(a, y), x_true, cfg.success_tol)
    if cfg.variant is Variant.POSITIVE_SIMPLEX:
        return not face_survival_trial(a, x_true, cfg.success_tol)
    raise ValueError(f"unsupported variant {cfg.variant!r}")


def _run_chunk(cfg: TrialConfig, start: int, stop: int) -> tuple[int, int]:
    failures = 0
    solver_failures = 0
    for idx in range(start, stop):
        try:
            failures += bool(_run_trial(cfg, idx))
        except SolverFailure:
            solver_failures += 1
    return failures, solver_failures


def estimate(config: TrialConfig, threads: int = 1) -> ErrorRateEstimate:
    """Failure-rate estimate over config.trials independent instances.

    Identical config gives an identical estimate for any thread count: every
    trial owns its own RNG stream and the chunk results reduce by integer
    addition.
    """
    trials = config.trials
    if threads <= 1 or trials < 64:
        failures, solver_failures = _run_chunk(config, 0, trials)
    else:
        edges = np.linspace(0, trials, 4 * threads + 1, dtype=int)
        failures = 0
        solver_failures = 0
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_chunk, config, int(lo), int(hi))
                for lo, hi in zip(edges[:-1], edges[1:])
                if hi > lo
            ]
            for fut in futures:
                f, s = fut.result()
                failures += f
                solver_failures += s
    valid = trials - solver_failures
    if valid == 0:
        raise SolverFailure("every trial failed to solve")
    lo, hi = wilson_interval(failures, valid)
    return ErrorRateEstimate(
        failures=failures,
        trials=valid,
        p_hat=failures / valid,
        ci_low=lo,
        ci_high=hi,
        solver_failures=solver_failures,
        flagged=solver_failures > 0.001 * trials,
    )
