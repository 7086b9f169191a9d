"""Self-check suites behind the `verify` command.

Each check returns its name, a pass flag, and the worst margin (how much
headroom remained; negative means breached).  The quick level runs the golden
table values, the angle cross-identities and summation identities on small
grids, and a short simulation; the full level widens the grids to the
acceptance sizes and runs the three 10^4-trial simulation cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import angles, exactprob, montecarlo
from .exactprob import ProblemDims, Variant

__all__ = ["CheckResult", "run_checks", "QUICK_CHECKS", "FULL_EXTRA_CHECKS"]

TABLE1_REF = {17: 0.8235, 18: 0.6815, 19: 0.5113, 20: 0.3427, 21: 0.2029, 22: 0.1053}
TABLE2_REF = {14: 0.7890, 15: 0.6786, 16: 0.5530, 17: 0.4248, 18: 0.3064, 19: 0.2069}
TABLE3_SIMPLEX_REF = {(3, 5, 8): 0.1265, (3, 4, 6): 0.1539, (4, 5, 8): 0.3401}
TABLE3_POSITIVE_REF = {(3, 5, 8): 0.1528, (3, 4, 6): 0.2305, (4, 5, 8): 0.3937}
TABLE3_SIMPLEX_NPLUS1_REF = {(3, 5, 9): 0.2091, (3, 4, 7): 0.3077, (4, 5, 9): 0.4789}
TABLE_TOL = 1.5e-3

_Z99 = 2.5758293035489004
_Z999 = 3.2905267314919255


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""


def _golden(name, pairs, tol=TABLE_TOL) -> CheckResult:
    worst = 0.0
    where = ""
    for label, got, ref in pairs:
        diff = abs(got - ref)
        if diff > worst:
            worst, where = diff, label
    return CheckResult(name, worst <= tol, tol - worst, f"worst |diff|={worst:.2e} at {where}")


def check_table1() -> CheckResult:
    pairs = [
        (f"m={m}", exactprob.p_err_positive(ProblemDims(12, m, 36)).value, ref)
        for m, ref in TABLE1_REF.items()
    ]
    return _golden("golden-positive-k12-n36", pairs)


def check_table2() -> CheckResult:
    pairs = [
        (f"m={m}", exactprob.p_err_standard(ProblemDims(6, m, 40)).value, ref)
        for m, ref in TABLE2_REF.items()
    ]
    return _golden("golden-standard-k6-n40", pairs)


def check_table3() -> CheckResult:
    pairs = []
    for (k, m, n), ref in TABLE3_SIMPLEX_REF.items():
        pairs.append((f"simplex{k,m,n}", exactprob.p_err_positive_simplex(ProblemDims(k, m, n)).value, ref))
    for (k, m, n), ref in TABLE3_POSITIVE_REF.items():
        pairs.append((f"positive{k,m,n}", exactprob.p_err_positive(ProblemDims(k, m, n)).value, ref))
    for (k, m, n), ref in TABLE3_SIMPLEX_NPLUS1_REF.items():
        pairs.append((f"simplex{k,m,n}", exactprob.p_err_positive_simplex(ProblemDims(k, m, n)).value, ref))
    return _golden("golden-simplex-survival", pairs)


def _complement_grid(ks, ns) -> CheckResult:
    worst = 0.0
    where = ""
    for k in ks:
        for n in ns:
            if n < max(k, 2):
                continue
            for m in range(k, n + 1):
                dims = ProblemDims(k, m, n)
                for variant in Variant:
                    gap = abs(
                        exactprob.p_err(variant, dims).value
                        + exactprob.p_complement(variant, dims).value
                        - 1.0
                    )
                    if gap > worst:
                        worst, where = gap, f"{variant.value}{k, m, n}"
    return CheckResult(
        "complement-identity", worst <= 1e-8, 1e-8 - worst, f"worst gap={worst:.2e} at {where}"
    )


def check_complement_quick() -> CheckResult:
    return _complement_grid(ks=(1, 2, 3), ns=(6, 9))


def check_complement_full() -> CheckResult:
    return _complement_grid(ks=range(1, 9), ns=range(6, 25))


def _identity_grid(n_max: int) -> CheckResult:
    worst = 0.0
    where = ""
    for k in range(1, n_max):
        for l in range(k, n_max):
            a = angles.internal_type1(k, l)
            b = angles.internal_simplex(k, l)
            gap = abs(a.value - b.value)
            if gap > worst:
                worst, where = gap, f"internal(k={k},l={l})"
    for l in range(0, n_max):
        for n in range(l + 1, n_max + 1):
            a = angles.external_std_type1(l, n)
            b = angles.external_crosspolytope(l, n)
            gap = abs(a.value - b.value)
            if gap > worst:
                worst, where = gap, f"external(l={l},n={n})"
    return CheckResult(
        "angle-cross-identities", worst <= 1e-10, 1e-10 - worst, f"worst gap={worst:.2e} at {where}"
    )


def check_identities_quick() -> CheckResult:
    return _identity_grid(12)


def check_identities_full() -> CheckResult:
    return _identity_grid(40)


def _crosspolytope_vs_standard(ks, ns) -> CheckResult:
    worst = 0.0
    where = ""
    for k in ks:
        for n in ns:
            if n < max(k, 2):
                continue
            for m in range(k, n + 1):
                dims = ProblemDims(k, m, n)
                gap = abs(
                    exactprob.p_err_crosspolytope(dims).value
                    - exactprob.p_err_standard(dims).value
                )
                if gap > worst:
                    worst, where = gap, f"{k, m, n}"
    return CheckResult(
        "crosspolytope-equals-standard", worst <= 1e-8, 1e-8 - worst,
        f"worst gap={worst:.2e} at {where}",
    )


def check_crosspolytope_quick() -> CheckResult:
    return _crosspolytope_vs_standard(ks=(1, 2, 3), ns=(6, 9))


def check_crosspolytope_full() -> CheckResult:
    return _crosspolytope_vs_standard(ks=range(1, 9), ns=range(6, 25))


def check_sandwich() -> CheckResult:
    worst = math.inf
    where = ""
    for (k, m, n) in TABLE3_SIMPLEX_REF:
        lo = exactprob.p_err_positive_simplex(ProblemDims(k, m, n))
        mid = exactprob.p_err_positive(ProblemDims(k, m, n))
        hi = exactprob.p_err_positive_simplex(ProblemDims(k, m, n + 1))
        m1 = mid.value - lo.value - (mid.error_bound + lo.error_bound)
        m2 = hi.value - mid.value - (hi.error_bound + mid.error_bound)
        for tag, margin in ((f"lower{k,m,n}", m1), (f"upper{k,m,n}", m2)):
            if margin < worst:
                worst, where = margin, tag
    return CheckResult(
        "simplex-sandwich", worst > 0.0, worst, f"smallest margin={worst:.2e} at {where}"
    )


def _mc_cell(variant, dims, trials, seed, threads, z) -> tuple[float, float, float, float]:
    est = montecarlo.estimate(
        montecarlo.TrialConfig(dims=dims, variant=variant, trials=trials, seed=seed),
        threads=threads,
    )
    lo, hi = montecarlo.wilson_interval(est.failures, est.trials, z=z)
    exact = exactprob.p_err(variant, dims).value
    return exact, lo, hi, est.p_hat


def check_mc_smoke(threads: int = 1) -> CheckResult:
    exact, lo, hi, p_hat = _mc_cell(
        Variant.POSITIVE_SIMPLEX, ProblemDims(3, 5, 8), 2000, 20240501, threads, _Z999
    )
    margin = min(exact - lo, hi - exact)
    return CheckResult(
        "mc-smoke-simplex-358", lo <= exact <= hi, margin,
        f"exact={exact:.4f} in [{lo:.4f}, {hi:.4f}] (p_hat={p_hat:.4f})",
    )


def check_mc_cells(threads: int = 1) -> CheckResult:
    cells = [
        (Variant.POSITIVE_L1, ProblemDims(12, 19, 36)),
        (Variant.STANDARD_L1, ProblemDims(6, 16, 40)),
        (Variant.POSITIVE_SIMPLEX, ProblemDims(3, 5, 8)),
    ]
    worst = math.inf
    where = ""
    ok = True
    for variant, dims in cells:
        exact, lo, hi, p_hat = _mc_cell(variant, dims, 10_000, 20240501, threads, _Z99)
        ok = ok and lo <= exact <= hi
        margin = min(exact - lo, hi - exact)
        if margin < worst:
            worst, where = margin, f"{variant.value}{dims.k, dims.m, dims.n}"
    return CheckResult(
        "mc-exact-agreement", ok, worst, f"smallest CI margin={worst:.2e} at {where}"
    )


QUICK_CHECKS = (
    check_table1,
    check_table2,
    check_table3,
    check_complement_quick,
    check_identities_quick,
    check_crosspolytope_quick,
    check_sandwich,
    check_mc_smoke,
)

FULL_EXTRA_CHECKS = (
    check_complement_full,
    check_identities_full,
    check_crosspolytope_full,
    check_mc_cells,
)


def run_checks(level: str = "quick", threads: int = 1):
    """Yield CheckResults for the requested level."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be quick or full, got {level!r}")
    for check in QUICK_CHECKS:
        if check in (check_mc_smoke,):
            yield check(threads)
        else:
            yield check()
    if level == "full":
        for check in FULL_EXTRA_CHECKS:
            if check in (check_mc_cells,):
                yield check(threads)
            else:
                yield check()
