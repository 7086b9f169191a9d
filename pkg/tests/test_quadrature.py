import math

import numpy as np
import pytest
from scipy.special import wofz

from l1exact.quadrature import (
    BadDecay,
    NonConvergence,
    QuadratureConfig,
    integrate_halfline,
    integrate_line,
    prob_nonneg_from_cf,
)
from l1exact.specialfn import log_one_minus_i_erfi_packed

from oracles import erfc_oracle_log

SQRT_2PI = math.sqrt(2.0 * math.pi)


def gaussian_log(t):
    return (-0.5 * np.asarray(t) ** 2).astype(complex)


class TestIntegrateLine:
    def test_gaussian_normalization(self):
        res = integrate_line(gaussian_log, decay_rate=1.0)
        assert res.value == pytest.approx(SQRT_2PI, rel=1e-10)
        assert abs(res.value - SQRT_2PI) <= max(res.error_bound, 1e-12)

    def test_scaled_gaussian(self):
        res = integrate_line(lambda t: (-2.0 * np.asarray(t) ** 2).astype(complex), decay_rate=4.0)
        assert res.value == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-10)

    def test_internal_angle_integrand_k1_l1(self):
        # one power of the half-normal characteristic factor against a
        # unit-width Gaussian: the odd imaginary part cancels, value 1/2
        def loggand(t):
            t = np.asarray(t, dtype=float)
            return log_one_minus_i_erfi_packed(t) - t * t

        res = integrate_line(loggand, decay_rate=1.0)
        pref = math.sqrt(2.0) / (2.0 * SQRT_2PI)
        assert pref * res.value == pytest.approx(0.5, rel=1e-10)
        # the imaginary residual is part of the reported error bound
        assert res.error_bound < 1e-10

    def test_doubling_budget_stays_within_error_bound(self):
        cfg1 = QuadratureConfig(max_subdivisions=2000)
        cfg2 = QuadratureConfig(max_subdivisions=4000)
        r1 = integrate_line(gaussian_log, 1.0, cfg1)
        r2 = integrate_line(gaussian_log, 1.0, cfg2)
        assert abs(r1.value - r2.value) <= r1.error_bound + 1e-15

    def test_line_equals_twice_halfline_on_even(self):
        line = integrate_line(gaussian_log, 1.0)
        half = integrate_halfline(gaussian_log, 1.0)
        assert line.value == pytest.approx(2.0 * half.value, abs=2 * (line.error_bound + half.error_bound) + 1e-13)

    def test_nonconvergence_raises(self):
        cfg = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-300, max_subdivisions=1)

        def wiggly(t):
            t = np.asarray(t, dtype=float)
            return -0.5 * t * t + 40j * t

        with pytest.raises(NonConvergence):
            integrate_line(wiggly, decay_rate=1.0, cfg=cfg)

    def test_bad_decay_raises(self):
        slow = lambda t: (-np.abs(np.asarray(t))).astype(complex)
        with pytest.raises(BadDecay):
            integrate_line(slow, decay_rate=30.0)

    def test_rejects_nonpositive_decay(self):
        with pytest.raises(ValueError):
            integrate_line(gaussian_log, decay_rate=0.0)


class TestIntegrateHalfline:
    def test_half_gaussian(self):
        res = integrate_halfline(gaussian_log, decay_rate=1.0)
        assert res.value == pytest.approx(SQRT_2PI / 2.0, rel=1e-10)

    def test_constant_factor(self):
        k_pow = 3

        def loggand(t):
            return (-0.5 * np.asarray(t) ** 2 - k_pow * math.log(2.0)).astype(complex)

        res = integrate_halfline(loggand, decay_rate=1.0)
        assert res.value == pytest.approx(2.0 ** (-k_pow) * SQRT_2PI / 2.0, rel=1e-10)

    def test_off_origin_peak(self):
        # peak far from zero exercises the probe extension
        def loggand(t):
            t = np.asarray(t, dtype=float)
            return (-0.5 * (t - 12.0) ** 2).astype(complex)

        res = integrate_halfline(loggand, decay_rate=1.0)
        assert res.value == pytest.approx(SQRT_2PI, rel=1e-9)


class TestProbNonnegFromCf:
    def test_standard_normal(self):
        res = prob_nonneg_from_cf(gaussian_log, mean=0.0, decay_rate=1.0)
        assert res.value == pytest.approx(0.5, abs=1e-10)

    def test_halfnormal_is_certain(self):
        # cf of |Z| is exactly the Faddeeva function w(t/sqrt 2): the
        # exp(-t^2/2) factor cancels erfi's growth, leaving a heavy 1/t tail
        def log_cf(t):
            t = np.asarray(t, dtype=float)
            return np.log(wofz(t / math.sqrt(2.0)))

        res = prob_nonneg_from_cf(log_cf, mean=math.sqrt(2.0 / math.pi))
        assert res.value == pytest.approx(1.0, abs=1e-10)

    def test_shifted_normal_matches_phi(self):
        def log_cf(t):
            t = np.asarray(t)
            return -0.5 * t * t - 1j * t

        res = prob_nonneg_from_cf(log_cf, mean=-1.0, decay_rate=1.0)
        phi_minus_one = 0.5 * math.exp(erfc_oracle_log(1.0 / math.sqrt(2.0)))
        assert phi_minus_one == pytest.approx(0.1586552539, abs=1e-10)
        assert res.value == pytest.approx(phi_minus_one, abs=1e-10)

    def test_symmetric_cf_gives_half(self):
        def log_cf(t):
            t = np.asarray(t)
            return -0.25 * t * t - 0.1 * t * t * t * t / (1 + t * t)

        res = prob_nonneg_from_cf(log_cf, mean=0.0, decay_rate=0.5)
        assert res.value == pytest.approx(0.5, abs=1e-10)

    def test_tilted_matches_plain_on_shifted_normal(self):
        def log_cf(t):
            t = np.asarray(t)
            return -0.5 * t * t - 2j * t

        plain = prob_nonneg_from_cf(log_cf, mean=-2.0, decay_rate=1.0)
        tilted = prob_nonneg_from_cf(log_cf, mean=-2.0, decay_rate=1.0, tilt=2.0)
        ref = 0.5 * math.exp(erfc_oracle_log(2.0 / math.sqrt(2.0)))
        assert plain.value == pytest.approx(ref, abs=1e-10)
        assert tilted.value == pytest.approx(ref, rel=1e-10)
        # log-scale twin agrees
        assert tilted.log_value == pytest.approx(math.log(ref), rel=1e-10)

    def test_tilted_resolves_tiny_probability(self):
        # N(-8, 1): P(X >= 0) = Phi(-8) ~ 6.2e-16, beyond plain inversion
        def log_cf(t):
            t = np.asarray(t)
            return -0.5 * t * t - 8j * t

        res = prob_nonneg_from_cf(log_cf, mean=-8.0, decay_rate=1.0, tilt=8.0)
        ref_log = erfc_oracle_log(8.0 / math.sqrt(2.0)) - math.log(2.0)
        assert res.log_value == pytest.approx(ref_log, rel=1e-10)

    def test_rejects_negative_tilt(self):
        with pytest.raises(ValueError):
            prob_nonneg_from_cf(gaussian_log, mean=0.0, tilt=-1.0)
