"""Large-deviation rate functions and phase-transition location.

In the proportional regime k = beta*n, m = alpha*n the log of the failure
probability per dimension converges to a rate built from a binomial-entropy
term and two one-dimensional optimizations (a tilted half-normal moment
problem and a Gaussian tail trade-off).  The per-dimension rate of the
dominant face dimension is pinned at rho = alpha: raising rho would describe
a system with more equations, whose failure probability cannot be larger.

The rate, as a function of alpha at fixed beta, is nonpositive and touches
zero exactly at the phase transition; it does not change sign there (the
failure side of the curve is where the same expression describes the decay
of the complementary success probability).  pt_alpha therefore locates the
tangency by maximization and certifies that the maximum is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exactprob import Variant
from .specialfn import entropy_H, erfc_log

__all__ = [
    "AsymParams",
    "RateResult",
    "BracketFailure",
    "NoSignChange",
    "rate_positive",
    "rate_standard",
    "rate",
    "pt_alpha",
]

_LN2 = math.log(2.0)

# inner optimizers never need to look past here; beyond it is a bracket bug
_BRACKET_CAP = 50.0

# the located maximum must sit this close to zero to certify the transition
_TANGENCY_TOL = 1e-6


class BracketFailure(Exception):
    """No unimodal bracket found for an inner 1-D optimization."""


class NoSignChange(Exception):
    """The rate curve's maximum is not at zero; no transition certified."""


@dataclass(frozen=True)
class AsymParams:
    """alpha = m/n, beta = k/n with 0 < beta < alpha < 1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.beta < self.alpha < 1.0):
            raise ValueError(
                f"need 0 < beta < alpha < 1, got alpha={self.alpha}, beta={self.beta}"
            )


@dataclass(frozen=True)
class RateResult:
    rate: float
    rho: float
    mu_star: float
    gamma_star: float
    combinatorial_term: float
    internal_term: float
    external_term: float


def _min_unimodal(f, xtol: float = 1e-10, cap: float = _BRACKET_CAP):
    """Golden-section minimum of a unimodal f on [0, cap].

    A geometric probe ladder from cap*2^-40 up to cap locates the coarse
    argmin; its neighbors bracket the true minimum by unimodality, and
    golden-section refines inside.  An argmin at the cap itself means the
    bracket never closed.
    """
    probes = [0.0] + [cap * 2.0 ** (-j) for j in range(40, -1, -1)]
    vals = [f(x) for x in probes]
    i = min(range(len(probes)), key=lambda idx: (vals[idx], idx))
    if i == len(probes) - 1:
        raise BracketFailure(f"no interior minimum found below {cap}")
    lo = probes[max(i - 1, 0)]
    hi = probes[i + 1]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > xtol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _mu_objective(mu: float, rho: float, beta: float) -> float:
    return (rho - beta) * erfc_log(mu) + rho * mu * mu


def _log_half_erfc_neg(g: float) -> float:
    # ln((1/2) erfc(-g)) for g >= 0
    return math.log1p(-0.5 * special.erfc(g))


def _log_erf(g: float) -> float:
    if g <= 0.0:
        return -math.inf
    return math.log(special.erf(g))


def _rate_components(p: AsymParams, external_log):
    rho, beta = p.alpha, p.beta
    comb = -(1.0 - beta) * entropy_H((1.0 - rho) / (1.0 - beta))
    mu_star, mu_val = _min_unimodal(lambda u: _mu_objective(u, rho, beta))
    internal = mu_val - (rho - beta) * _LN2
    gamma_star, neg_ext = _min_unimodal(
        lambda g: rho * g * g - (1.0 - rho) * external_log(g)
    )
    return comb, internal, mu_star, gamma_star, -neg_ext


def rate_positive(p: AsymParams) -> RateResult:
    """Decay rate of the nonnegative-l1 failure probability at rho = alpha."""
    comb, internal, mu_star, gamma_star, external = _rate_components(p, _log_half_erfc_neg)
    return RateResult(
        rate=comb + internal + external,
        rho=p.alpha,
        mu_star=mu_star,
        gamma_star=gamma_star,
        combinatorial_term=comb,
        internal_term=internal,
        external_term=external,
    )


def rate_standard(p: AsymParams) -> RateResult:
    """Decay rate of the plain-l1 failure probability at rho = alpha.

    The sign-pattern factor 2^(l-k+1) in the face count cancels the matching
    power of 1/2 in the internal angle, and the external slab probability
    becomes a single erf.
    """
    comb, internal, mu_star, gamma_star, external = _rate_components(p, _log_erf)
    rho, beta = p.alpha, p.beta
    return RateResult(
        rate=comb + (rho - beta) * _LN2 + internal + external,
        rho=rho,
        mu_star=mu_star,
        gamma_star=gamma_star,
        combinatorial_term=comb + (rho - beta) * _LN2,
        internal_term=internal,
        external_term=external,
    )


_RATE_FUNCS = {
    Variant.POSITIVE_L1: rate_positive,
    Variant.STANDARD_L1: rate_standard,
}


def rate(variant: Variant, p: AsymParams) -> RateResult:
    return _RATE_FUNCS[Variant(variant)](p)


def pt_alpha(beta: float, variant: Variant = Variant.POSITIVE_L1, _rate_fn=None) -> float:
    """The alpha where the rate curve touches zero: the phase transition.

    Located as the maximizer of rate(alpha) over (beta, 1) via a coarse scan
    plus golden-section refinement to a bracket of width 1e-8.  Raises
    NoSignChange if the maximum is not zero to within 1e-6 (the curve then
    does not certify a transition).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    fn = _rate_fn or _RATE_FUNCS[Variant(variant)]

    def neg_rate(a: float) -> float:
        return -fn(AsymParams(alpha=a, beta=beta)).rate

    lo = beta + 1e-7
    hi = 1.0 - 1e-9
    grid = np.linspace(lo, hi, 121)
    vals = [neg_rate(a) for a in grid]
    i = int(np.argmin(vals))
    a_lo = grid[max(i - 1, 0)]
    a_hi = grid[min(i + 1, len(grid) - 1)]

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = a_hi - inv_phi * (a_hi - a_lo)
    x2 = a_lo + inv_phi * (a_hi - a_lo)
    f1, f2 = neg_rate(x1), neg_rate(x2)
    while a_hi - a_lo > 1e-8:
        if f1 <= f2:
            a_hi, x2, f2 = x2, x1, f1
            x1 = a_hi - inv_phi * (a_hi - a_lo)
            f1 = neg_rate(x1)
        else:
            a_lo, x1, f1 = x1, x2, f2
            x2 = a_lo + inv_phi * (a_hi - a_lo)
            f2 = neg_rate(x2)
    a_w = 0.5 * (a_lo + a_hi)
    peak = -neg_rate(a_w)
    if abs(peak) > _TANGENCY_TOL:
        raise NoSignChange(
            f"rate maximum {peak:.3e} at alpha={a_w:.6f} is not zero; "
            "no phase transition certified"
        )
    return float(a_w)
