"""Exact recovery-failure probabilities assembled from face counts and angles.

Every probability is an alternating-parity sum over face dimensions l of
count * internal * external products, doubled.  Counts reach 2^35 * C(34, .)
while angles underflow in the same term, so each term is assembled on the log
scale and the sum is taken by log-sum-exp over magnitude-sorted terms; the
products themselves are all O(1) or smaller.

The complementary ("bottom") sums run over the other tail of the same parity
class and satisfy p_err + p_complement = 1, which the test suite uses as a
cross-path identity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import angles
from .angles import AngleFamily, AngleValue
from .quadrature import QuadratureConfig, RangeViolation
from .specialfn import log_binomial

__all__ = [
    "ProblemDims",
    "Variant",
    "FaceCount",
    "Term",
    "ProbBreakdown",
    "face_count",
    "p_err_positive",
    "p_err_standard",
    "p_err_positive_simplex",
    "p_err_crosspolytope",
    "p_err",
    "p_complement",
    "sweep",
]

_LN2 = math.log(2.0)

# math.comb stays exact and cheap up to here
_EXACT_COUNT_MAX_N = 60

# sums are clamped into [0,1] only within this slack; worse is an error
_PROB_SLACK = 1e-10


@dataclass(frozen=True)
class ProblemDims:
    """Sparsity k, equations m, unknowns n."""

    k: int
    m: int
    n: int

    def __post_init__(self):
        if not (1 <= self.k <= self.m <= self.n) or self.n < 2:
            raise ValueError(
                f"need 1 <= k <= m <= n and n >= 2, got k={self.k}, m={self.m}, n={self.n}"
            )


class Variant(str, enum.Enum):
    POSITIVE_L1 = "pos"
    STANDARD_L1 = "std"
    POSITIVE_SIMPLEX = "pos-simplex"
    CROSSPOLYTOPE = "crosspolytope"


@dataclass(frozen=True)
class FaceCount:
    log: float
    exact: int | None


def face_count(family: AngleFamily, k: int, l: int, n: int) -> FaceCount:
    """Number of l-faces in the family (log scale, exact integer for n <= 60).

    Out-of-range dimensions return a -inf log / zero count via the binomial
    sentinel, so probability sums need no explicit range logic.
    """
    if k < 1 or n < k:
        raise ValueError(f"face_count requires 1 <= k <= n, got k={k}, n={n}")
    if family in (AngleFamily.POS_TYPE1, AngleFamily.SIMPLEX_FACE):
        log = log_binomial(n - k, n - l - 1)
        exact = math.comb(n - k, n - l - 1) if 0 <= n - l - 1 <= n - k else 0
    elif family is AngleFamily.POS_TYPE2:
        log = log_binomial(n - k, n - l)
        exact = math.comb(n - k, n - l) if 0 <= n - l <= n - k else 0
    elif family in (AngleFamily.STD_TYPE1, AngleFamily.CROSSPOLYTOPE_FACE):
        log = (l - k + 1) * _LN2 + log_binomial(n - k, n - l - 1)
        exact = (
            (1 << (l - k + 1)) * math.comb(n - k, n - l - 1)
            if 0 <= n - l - 1 <= n - k
            else 0
        )
    elif family is AngleFamily.FULL_CONE:
        log, exact = (0.0, 1) if l == n else (-math.inf, 0)
    else:
        raise ValueError(f"unknown family {family!r}")
    if n > _EXACT_COUNT_MAX_N:
        exact = None
    return FaceCount(log, exact)


@dataclass(frozen=True)
class Term:
    l: int
    family: AngleFamily
    count: float
    internal: AngleValue
    external: AngleValue
    term_value: float
    log_term: float


@dataclass(frozen=True)
class ProbBreakdown:
    """A probability with its per-face-dimension term list.

    ``form`` records how ``value`` was assembled: "top" and "complement" mean
    value = 2 * sum(term_value), "bottom" means value = 1 - 2 * sum(term_value).
    ``cross_residual`` is the disagreement against the alternative summation
    path when one exists (crosspolytope only), as a diagnostic.
    """

    value: float
    terms: tuple[Term, ...] = field(repr=False)
    error_bound: float
    form: str
    cross_residual: float | None = None


_ONE = AngleValue(1.0, 0.0, 0.0)


def _make_term(family, k, l, n, internal, external) -> Term | None:
    fc = face_count(family, k, l, n)
    if fc.log == -math.inf:
        return None
    log_term = fc.log + internal.log_value + external.log_value
    return Term(
        l=l,
        family=family,
        count=math.exp(fc.log),
        internal=internal,
        external=external,
        term_value=math.exp(log_term),
        log_term=log_term,
    )


def _terms_at(variant: Variant, dims: ProblemDims, l: int, cfg) -> list[Term]:
    k, n = dims.k, dims.n
    out = []
    if variant is Variant.POSITIVE_L1:
        if l <= n - 1:
            t = _make_term(
                AngleFamily.POS_TYPE1, k, l, n,
                angles.internal_type1(k, l, cfg), angles.external_pos_type1(l, n, cfg),
            )
            if t:
                out.append(t)
        if l >= k:
            t = _make_term(
                AngleFamily.POS_TYPE2, k, l, n,
                angles.internal_type2(k, l, cfg), angles.external_pos_type2(l, n),
            )
            if t:
                out.append(t)
    elif variant is Variant.STANDARD_L1:
        if l <= n - 1:
            t = _make_term(
                AngleFamily.STD_TYPE1, k, l, n,
                angles.internal_type1(k, l, cfg), angles.external_std_type1(l, n, cfg),
            )
            if t:
                out.append(t)
        else:
            t = _make_term(
                AngleFamily.FULL_CONE, k, l, n, angles.internal_full_cone(k, n, cfg), _ONE
            )
            if t:
                out.append(t)
    elif variant is Variant.POSITIVE_SIMPLEX:
        if l <= n - 1:
            t = _make_term(
                AngleFamily.SIMPLEX_FACE, k, l, n,
                angles.internal_simplex(k, l, cfg), angles.external_simplex(l, n, cfg),
            )
            if t:
                out.append(t)
    elif variant is Variant.CROSSPOLYTOPE:
        if l <= n - 1:
            t = _make_term(
                AngleFamily.CROSSPOLYTOPE_FACE, k, l, n,
                angles.internal_simplex(k, l, cfg), angles.external_crosspolytope(l, n, cfg),
            )
            if t:
                out.append(t)
        else:
            t = _make_term(
                AngleFamily.FULL_CONE, k, l, n, angles.internal_full_cone(k, n, cfg), _ONE
            )
            if t:
                out.append(t)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return out


def _collect(variant, dims, parity: str, cfg) -> list[Term]:
    m, n, k = dims.m, dims.n, dims.k
    if parity == "top":
        ls = range(m + 1, n + 1, 2)
    else:
        ls = range(m - 1, k - 2, -2)
    terms = []
    for l in ls:
        terms.extend(_terms_at(variant, dims, l, cfg))
    return terms


def _logsumexp_terms(terms) -> float:
    if not terms:
        return -math.inf
    # presorted by magnitude so the reduction order is deterministic
    logs = sorted((t.log_term for t in terms), reverse=True)
    top = logs[0]
    if top == -math.inf:
        return -math.inf
    return top + math.log(sum(math.exp(x - top) for x in logs))


def _error_sum(terms) -> float:
    return 2.0 * sum(
        t.count
        * (t.internal.error_bound * t.external.value + t.internal.value * t.external.error_bound)
        for t in terms
    )


def _clamp_prob(value: float) -> float:
    if value < -_PROB_SLACK or value > 1.0 + _PROB_SLACK:
        raise RangeViolation(f"assembled probability {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def _top_sum(variant, dims, cfg) -> ProbBreakdown:
    terms = _collect(variant, dims, "top", cfg)
    value = _clamp_prob(2.0 * math.exp(_logsumexp_terms(terms)))
    return ProbBreakdown(value, tuple(terms), _error_sum(terms), "top")


def p_err_positive(dims: ProblemDims, cfg: QuadratureConfig | None = None) -> ProbBreakdown:
    """Failure probability of nonnegativity-constrained l1 recovery."""
    return _top_sum(Variant.POSITIVE_L1, dims, cfg)


def p_err_standard(dims: ProblemDims, cfg: QuadratureConfig | None = None) -> ProbBreakdown:
    """Failure probability of plain l1 recovery."""
    return _top_sum(Variant.STANDARD_L1, dims, cfg)


def p_err_positive_simplex(dims: ProblemDims, cfg: QuadratureConfig | None = None) -> ProbBreakdown:
    """Probability that a simplex face does not survive the random projection."""
    return _top_sum(Variant.POSITIVE_SIMPLEX, dims, cfg)


def p_err_crosspolytope(dims: ProblemDims, cfg: QuadratureConfig | None = None) -> ProbBreakdown:
    """Crosspolytope face-survival failure probability (equals p_err_standard).

    When the face-dimension parity reaches l = n, the complementary bottom
    sum is returned (1 - 2 * sum), avoiding the full-cone term; otherwise the
    top sum is used.  The other path's value is recorded as cross_residual.
    """
    top_terms = _collect(Variant.CROSSPOLYTOPE, dims, "top", cfg)
    bot_terms = _collect(Variant.CROSSPOLYTOPE, dims, "bottom", cfg)
    top_val = 2.0 * math.exp(_logsumexp_terms(top_terms))
    bot_val = 1.0 - 2.0 * math.exp(_logsumexp_terms(bot_terms))
    parity_reaches_n = (dims.n - (dims.m + 1)) % 2 == 0
    if parity_reaches_n:
        value = _clamp_prob(bot_val)
        return ProbBreakdown(
            value, tuple(bot_terms), _error_sum(bot_terms), "bottom",
            cross_residual=abs(top_val - value),
        )
    value = _clamp_prob(top_val)
    return ProbBreakdown(
        value, tuple(top_terms), _error_sum(top_terms), "top",
        cross_residual=abs(bot_val - value),
    )


_TOP_FUNCS = {
    Variant.POSITIVE_L1: p_err_positive,
    Variant.STANDARD_L1: p_err_standard,
    Variant.POSITIVE_SIMPLEX: p_err_positive_simplex,
    Variant.CROSSPOLYTOPE: p_err_crosspolytope,
}


def p_err(variant: Variant, dims: ProblemDims, cfg: QuadratureConfig | None = None) -> ProbBreakdown:
    return _TOP_FUNCS[Variant(variant)](dims, cfg)


def p_complement(variant: Variant, dims: ProblemDims, cfg: QuadratureConfig | None = None) -> ProbBreakdown:
    """Probability of recovery success, summed over the other parity tail.

    Independent summation path: p_err(...) + p_complement(...) = 1 is the
    angle-sum identity the acceptance suite checks to 1e-8.
    """
    terms = _collect(Variant(variant), dims, "bottom", cfg)
    value = _clamp_prob(2.0 * math.exp(_logsumexp_terms(terms)))
    return ProbBreakdown(value, tuple(terms), _error_sum(terms), "complement")


def sweep(
    variant: Variant,
    k: int,
    n: int,
    m_values,
    cfg: QuadratureConfig | None = None,
) -> list[tuple[int, float]]:
    """p_err over a range of equation counts at fixed (k, n)."""
    out = []
    for m in m_values:
        dims = ProblemDims(k, int(m), n)
        out.append((int(m), p_err(variant, dims, cfg).value))
    return out
