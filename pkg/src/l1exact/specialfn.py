"""Numerically stable scalar special functions used by every integrand.

The angle integrands raise (1 - i*erfi(t/sqrt(2))) to powers of order n, and
erfi alone overflows a double near t ~ 38.  Everything here therefore keeps
large quantities on the natural-log scale: erfc via the scaled erfcx, erfi via
the bounded Dawson function, binomials via exact integers or log-gamma.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "LogComplex",
    "erfc_log",
    "dawson",
    "log_one_minus_i_erfi",
    "log_binomial",
    "entropy_H",
]

_SQRT2 = math.sqrt(2.0)
_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)

# above this, erfi(a)^2 would overflow and atan(erfi) is pi/2 to machine precision
_ERFI_LOG_CUT = 300.0

# math.comb is exact; beyond this we switch to log-gamma
_EXACT_BINOM_MAX_N = 60


@dataclass(frozen=True)
class LogComplex:
    """A nonzero complex value stored as (log of magnitude, phase).

    Represents magnitudes far outside double range; ``phase`` is kept on the
    principal branch (-pi, pi].
    """

    log_magnitude: float
    phase: float

    def exp(self) -> complex:
        """Materialize the complex value (may overflow to inf for huge logs)."""
        return cmath.rect(math.exp(self.log_magnitude), self.phase)

    def as_log(self) -> complex:
        """Pack as a complex 'log-value': real part log|z|, imag part arg z."""
        return complex(self.log_magnitude, self.phase)


def erfc_log(x: float) -> float:
    """ln(erfc(x)).

    Uses the scaled complementary error function for x >= 0 so the result
    stays accurate long after erfc itself underflows (erfc(30) ~ 1e-393).
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("erfc_log requires finite x")
    if x < 0.0:
        # erfc in (1, 2): direct log is exact enough
        return math.log(special.erfc(x))
    return math.log(special.erfcx(x)) - x * x


def dawson(x: float) -> float:
    """Dawson function D(x) = exp(-x^2) * int_0^x exp(t^2) dt."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("dawson requires finite x")
    return float(special.dawsn(x))


def _erfi_log_abs(a: float) -> float:
    """ln erfi(a) for a > 0, assembled from the bounded Dawson function."""
    return a * a + math.log(_TWO_OVER_SQRTPI * special.dawsn(a))


def log_one_minus_i_erfi(t: float) -> LogComplex:
    """Principal-branch complex log of 1 - i*erfi(t/sqrt(2)).

    The exp(t^2/2) growth of erfi is carried on the log scale, so the result
    is finite for any t a double can hold.
    """
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("log_one_minus_i_erfi requires finite t")
    if t == 0.0:
        return LogComplex(0.0, 0.0)
    a = abs(t) / _SQRT2
    log_e = _erfi_log_abs(a)
    if log_e <= _ERFI_LOG_CUT:
        e = math.exp(log_e)
        log_mag = 0.5 * math.log1p(e * e)
        ph = math.atan(e)
    else:
        # sqrt(1+e^2) == e and atan(e) == pi/2 - 1/e at this magnitude
        log_mag = log_e
        ph = 0.5 * math.pi - math.exp(-log_e)
    return LogComplex(log_mag, -ph if t > 0 else ph)


def log_one_minus_i_erfi_packed(t: np.ndarray) -> np.ndarray:
    """Vectorized log_one_minus_i_erfi packed as complex log-values."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t) / _SQRT2
    with np.errstate(divide="ignore"):
        log_e = a * a + np.log(_TWO_OVER_SQRTPI * special.dawsn(a))
    log_mag = np.where(log_e > _ERFI_LOG_CUT, log_e, 0.0)
    ph = np.where(log_e > _ERFI_LOG_CUT, 0.5 * np.pi - np.exp(-np.maximum(log_e, 0.0)), 0.0)
    small = log_e <= _ERFI_LOG_CUT
    e = np.exp(np.where(small, log_e, 0.0))
    log_mag = np.where(small, 0.5 * np.log1p(e * e), log_mag)
    ph = np.where(small, np.arctan(e), ph)
    return log_mag - 1j * np.sign(t) * ph


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k); -inf when k < 0 or k > n so out-of-range terms vanish."""
    n = int(n)
    k = int(k)
    if n < 0:
        raise ValueError("log_binomial requires n >= 0")
    if k < 0 or k > n:
        return -math.inf
    if n <= _EXACT_BINOM_MAX_N:
        return math.log(math.comb(n, k))
    return float(special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1))


def entropy_H(x: float) -> float:
    """x*ln(x) + (1-x)*ln(1-x) on [0, 1], with 0*ln(0) taken as 0."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy_H requires x in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return x * math.log(x) + (1.0 - x) * math.log1p(-x)
