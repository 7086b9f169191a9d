"""Internal and external angles of the six polyhedral-cone face families.

Each operation is a pure function of the face indices (k, l, n) returning a
number in [0, 1] with an attached quadrature error bound and a log-scale twin
for the probability layer.

The two oscillatory internal-angle integrals are evaluated on a contour
shifted to the saddle point of the integrand (through the Faddeeva function
``w``, which is bounded in the half-plane the shift moves into).  On the real
axis the integrand of, say, the (k=6, l=39) angle cancels to eleven digits
below its own magnitude, which a real-axis rule cannot survive; on the saddle
line the integrand is locally positive and the cancellation disappears.  The
orthant-probability angles similarly use an exponentially tilted inversion
once the plain inversion would lose them in the 1/2 offset.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .quadrature import (
    IntegralResult,
    ProbResult,
    QuadratureConfig,
    RangeViolation,
    integrate_halfline,
    integrate_line,
    prob_nonneg_from_cf,
)
from .specialfn import erfc_log

__all__ = [
    "AngleFamily",
    "FaceIndex",
    "AngleValue",
    "internal_type1",
    "internal_type2",
    "internal_full_cone",
    "internal_simplex",
    "external_pos_type1",
    "external_pos_type2",
    "external_std_type1",
    "external_simplex",
    "external_crosspolytope",
    "clear_cache",
]

_SQRT2 = math.sqrt(2.0)
_LN2 = math.log(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)

# tighter than the probability-layer target so angle error never dominates
_ANGLE_CFG = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-16, max_subdivisions=4000, tail_tol=1e-17)

# negative values beyond this are errors, not roundoff
_CLAMP_TOL = 1e-12

# below this tilt the plain inversion is at least as well conditioned
_MIN_TILT = 0.1


class AngleFamily(enum.Enum):
    POS_TYPE1 = "pos-type1"
    POS_TYPE2 = "pos-type2"
    STD_TYPE1 = "std-type1"
    FULL_CONE = "full-cone"
    SIMPLEX_FACE = "simplex-face"
    CROSSPOLYTOPE_FACE = "crosspolytope-face"


@dataclass(frozen=True)
class FaceIndex:
    """A face of one of the cone/polytope families, validated on construction."""

    k: int
    l: int
    n: int
    family: AngleFamily

    def __post_init__(self):
        k, l, n = self.k, self.l, self.n
        if not (k >= 1 and k <= n):
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        if not (k - 1 <= l <= n):
            raise ValueError(f"need k-1 <= l <= n, got k={k}, l={l}, n={n}")
        if self.family in (AngleFamily.POS_TYPE1, AngleFamily.STD_TYPE1) and l > n - 1:
            raise ValueError(f"{self.family.value} faces require l <= n-1")
        if self.family is AngleFamily.POS_TYPE2 and l < k:
            raise ValueError("pos-type2 faces require l >= k")


@dataclass(frozen=True)
class AngleValue:
    """An angle in [0, 1] with its quadrature error bound and log-scale value."""

    value: float
    error_bound: float
    log_value: float


_cache: dict = {}
_cache_lock = threading.Lock()


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def _cached(key, builder):
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    val = builder()
    with _cache_lock:
        _cache.setdefault(key, val)
        return _cache[key]


def _finish(log_value: float, error_bound: float) -> AngleValue:
    value = math.exp(log_value) if log_value > -745.0 else 0.0
    if value < -_CLAMP_TOL or value > 1.0 + _CLAMP_TOL:
        raise RangeViolation(f"angle {value!r} outside [0, 1] beyond clamp tolerance")
    return AngleValue(min(max(value, 0.0), 1.0), error_bound, min(log_value, 0.0))


def _exact_angle(value: float) -> AngleValue:
    return AngleValue(value, 0.0, math.log(value))


def _saddle_shift(q: int, k: int) -> tuple[float, float]:
    """Minimizer y* and value of f(y) = q*(y^2 + ln erfc(y)) + k*y^2.

    f is the log of the shifted-contour integrand at its crossing of the
    imaginary axis; f is strictly convex with f'(0) < 0, so the root of f'
    is unique.
    """
    if q == 0:
        return 0.0, 0.0

    def fprime(y):
        return q * (2.0 * y - _TWO_OVER_SQRTPI / special.erfcx(y)) + 2.0 * k * y

    hi = 1.0
    while fprime(hi) < 0.0:
        hi *= 2.0
    y = brentq(fprime, 0.0, hi, xtol=1e-15, rtol=8.9e-16)
    return y, q * (y * y + erfc_log(y)) + k * y * y


def _internal_line_angle(k: int, l: int, conjugate: bool, cfg: QuadratureConfig) -> AngleValue:
    """Common saddle-line evaluation behind internal_type1 / internal_simplex.

    In the variable u the integral is
        sqrt(l+1) / (2^q sqrt(pi)) * Re int w(-+u)^q e^(-k u^2) du,  q = l-k+1,
    shifted to the horizontal line through the saddle at u = -+ i y*.
    """
    q = l - k + 1
    if q == 0:
        return _exact_angle(1.0)
    y, f_y = _saddle_shift(q, k)
    sgn = 1.0 if conjugate else -1.0

    def loggand(x):
        u = x + sgn * 1j * y
        return q * np.log(special.wofz(sgn * u)) - k * u * u - f_y

    res = integrate_line(loggand, decay_rate=2.0 * k, cfg=cfg)
    if res.value <= 0.0:
        raise RangeViolation("saddle-line internal angle integral collapsed")
    log_pref = 0.5 * math.log(l + 1) - 0.5 * math.log(math.pi) - q * _LN2
    log_val = log_pref + f_y + math.log(res.value)
    err = math.exp(log_pref + f_y) * res.error_bound
    return _finish(log_val, err)


def internal_type1(k: int, l: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """Internal angle at the apex of a type-1 (equality facet) cone face."""
    if k < 1 or l < k - 1:
        raise ValueError(f"internal_type1 requires k >= 1 and l >= k-1, got {k}, {l}")
    cfg = cfg or _ANGLE_CFG
    return _cached(("int1", k, l), lambda: _internal_line_angle(k, l, False, cfg))


def internal_simplex(k: int, l: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """Internal angle of the regular l-simplex at one of its (k-1)-faces.

    Same value as internal_type1 but evaluated through the conjugate sign
    convention, so the pair serves as an independent cross-check.
    """
    if k < 1 or l < k - 1:
        raise ValueError(f"internal_simplex requires k >= 1 and l >= k-1, got {k}, {l}")
    cfg = cfg or _ANGLE_CFG
    return _cached(("intsimp", k, l), lambda: _internal_line_angle(k, l, True, cfg))


def _log_cf_gauss_halfnormal(n_gauss: int, n_half: int):
    """log E exp(i t X) for X = -(sum of n_gauss normals + n_half half-normals).

    Valid for complex t (lower half-plane shifts land the Faddeeva argument in
    the upper half-plane, where it is bounded and stable).
    """

    def log_cf(t):
        t = np.asarray(t)
        return -0.5 * n_gauss * t * t + n_half * np.log(special.wofz(-t / _SQRT2))

    return log_cf


def _sum_nonneg_prob(n_gauss: int, n_half: int, cfg: QuadratureConfig) -> ProbResult:
    """P(X >= 0) for X = -(n_gauss normals + n_half half-normals).

    Chooses the exponentially tilted inversion whenever the mgf saddle is far
    enough from zero that the plain inversion would bury the answer in its
    1/2 offset.
    """
    if n_gauss < 1:
        raise ValueError("need at least one Gaussian coordinate")
    if n_half == 0:
        return ProbResult(0.5, math.log(0.5), 0.0, 0)
    total = n_gauss + n_half
    mean = -n_half * _SQRT_2_OVER_PI

    def kprime(s):
        return total * s - n_half * _SQRT_2_OVER_PI / special.erfcx(s / _SQRT2)

    hi = 1.0
    while kprime(hi) < 0.0:
        hi *= 2.0
    saddle = brentq(kprime, 0.0, hi, xtol=1e-14, rtol=8.9e-16)
    tilt = saddle if saddle >= _MIN_TILT else 0.0
    log_cf = _log_cf_gauss_halfnormal(n_gauss, n_half)
    return prob_nonneg_from_cf(log_cf, mean, cfg, decay_rate=float(n_gauss), tilt=tilt)


def internal_type2(k: int, l: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """Internal angle at the apex of a type-2 (orthant-restricted) cone face.

    Equals 2^-(l-k) * P(X >= 0) with X a sum of k sign-free Gaussians and
    l-k half-normals, all negated.
    """
    if k < 1 or l < k:
        raise ValueError(f"internal_type2 requires k >= 1 and l >= k, got {k}, {l}")
    cfg = cfg or _ANGLE_CFG

    def build():
        res = _sum_nonneg_prob(k, l - k, cfg)
        log_val = -(l - k) * _LN2 + res.log_value
        return _finish(log_val, math.exp(-(l - k) * _LN2) * res.error_bound)

    return _cached(("int2", k, l), build)


def internal_full_cone(k: int, n: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """Internal angle at the apex of the full sign-symmetric cone.

    This is the plain Gaussian measure P(X >= 0) of the cone: folding the
    n-k sign-symmetric coordinates into an orthant contributes 2^(n-k),
    which cancels exactly against the half-normal density normalisation,
    so no 2^-(n-k) factor appears (unlike the one-orthant type-2 face).
    """
    if not 1 <= k <= n:
        raise ValueError(f"internal_full_cone requires 1 <= k <= n, got {k}, {n}")
    cfg = cfg or _ANGLE_CFG

    def build():
        res = _sum_nonneg_prob(k, n - k, cfg)
        return _finish(res.log_value, res.error_bound)

    return _cached(("intcone", k, n), build)


def _require_face_range(name: str, l: int, n: int, top: int) -> None:
    if not 0 <= l <= top:
        raise ValueError(f"{name} requires 0 <= l <= {top} for n={n}, got l={l}")


def _log_half_erfc_neg(x):
    """ln((1/2) erfc(-x)), stable on the whole line (vectorized)."""
    x = np.asarray(x, dtype=float)
    pos = x >= 0
    out = np.empty_like(x)
    out[pos] = np.log1p(-0.5 * special.erfc(x[pos]))
    xm = -x[~pos]
    out[~pos] = np.log(special.erfcx(xm)) - xm * xm - _LN2
    return out


def _halfline_prefactor_log() -> float:
    """Log prefactor of the one-dimensional Gaussian on the external-angle line."""
    return -0.5 * math.log(2.0 * math.pi)


def external_pos_type1(l: int, n: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """External angle of a type-1 face of the nonnegativity-constrained cone."""
    _require_face_range("external_pos_type1", l, n, n - 1)
    cfg = cfg or _ANGLE_CFG
    q = n - l - 1
    if q == 0:
        return _exact_angle(0.5)

    def build():
        c = _SQRT2 * math.sqrt(l + 1)

        def loggand(g):
            g = np.asarray(g, dtype=float)
            return -0.5 * g * g + q * _log_half_erfc_neg(g / c)

        res = integrate_halfline(loggand, decay_rate=1.0, cfg=cfg)
        log_val = _halfline_prefactor_log() + math.log(res.value)
        return _finish(log_val, math.exp(_halfline_prefactor_log()) * res.error_bound)

    return _cached(("extpos1", l, n), build)


def external_pos_type2(l: int, n: int) -> AngleValue:
    """External angle of a type-2 face: exactly 2^-(n-l), no quadrature."""
    if not 0 <= l <= n:
        raise ValueError(f"external_pos_type2 requires 0 <= l <= n, got {l}, {n}")
    return AngleValue(2.0 ** (-(n - l)), 0.0, -(n - l) * _LN2)


def external_std_type1(l: int, n: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """External angle of a sign-symmetric type-1 face; the two-sided slab
    probability collapses to a single erf factor."""
    _require_face_range("external_std_type1", l, n, n - 1)
    cfg = cfg or _ANGLE_CFG
    q = n - l - 1
    if q == 0:
        return _exact_angle(0.5)

    def build():
        c = _SQRT2 * math.sqrt(l + 1)

        def loggand(g):
            g = np.asarray(g, dtype=float)
            with np.errstate(divide="ignore"):
                return -0.5 * g * g + q * np.log(special.erf(g / c))

        res = integrate_halfline(loggand, decay_rate=1.0, cfg=cfg)
        log_val = _halfline_prefactor_log() + math.log(res.value)
        return _finish(log_val, math.exp(_halfline_prefactor_log()) * res.error_bound)

    return _cached(("extstd1", l, n), build)


def external_simplex(l: int, n: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """External angle of the regular (n-1)-simplex at one of its l-faces.

    Full-line integral; the half-line external_pos_type1 is strictly smaller
    for l < n-1 under the matching change of variable.
    """
    _require_face_range("external_simplex", l, n, n - 1)
    cfg = cfg or _ANGLE_CFG
    q = n - l - 1
    if q == 0:
        return _exact_angle(1.0)

    def build():
        def loggand(x):
            x = np.asarray(x, dtype=float)
            return -(l + 1.0) * x * x + q * _log_half_erfc_neg(x)

        res = integrate_line(loggand, decay_rate=2.0 * (l + 1), cfg=cfg)
        log_pref = 0.5 * (math.log(l + 1) - math.log(math.pi))
        return _finish(log_pref + math.log(res.value), math.exp(log_pref) * res.error_bound)

    return _cached(("extsimp", l, n), build)


def external_crosspolytope(l: int, n: int, cfg: QuadratureConfig | None = None) -> AngleValue:
    """External angle of the crosspolytope at one of its l-faces.

    Same value as external_std_type1 but integrated in the rescaled variable,
    giving an independent code path for the cross-check.
    """
    _require_face_range("external_crosspolytope", l, n, n - 1)
    cfg = cfg or _ANGLE_CFG
    q = n - l - 1
    if q == 0:
        return _exact_angle(0.5)

    def build():
        def loggand(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore"):
                return -(l + 1.0) * x * x + q * np.log(special.erf(x))

        res = integrate_halfline(loggand, decay_rate=2.0 * (l + 1), cfg=cfg)
        log_pref = 0.5 * (math.log(l + 1) - math.log(math.pi))
        return _finish(log_pref + math.log(res.value), math.exp(log_pref) * res.error_bound)

    return _cached(("extcross", l, n), build)
