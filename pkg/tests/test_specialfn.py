import math

import numpy as np
import pytest

from l1exact.specialfn import (
    LogComplex,
    dawson,
    entropy_H,
    erfc_log,
    log_binomial,
    log_one_minus_i_erfi,
    log_one_minus_i_erfi_packed,
)

from oracles import dawson_taylor, erfc_oracle_log, erfi_series, exact_binom


class TestErfcLog:
    def test_zero(self):
        assert erfc_log(0.0) == pytest.approx(0.0, abs=1e-15)

    def test_minus_ten_is_log_two(self):
        assert erfc_log(-10.0) == pytest.approx(math.log(2.0), rel=1e-12)

    def test_at_five_vs_continued_fraction(self):
        assert erfc_log(5.0) == pytest.approx(erfc_oracle_log(5.0), rel=1e-12)
        assert erfc_log(5.0) == pytest.approx(-27.2, abs=0.1)

    def test_grid_vs_oracle(self):
        for x in np.linspace(-30, 30, 121):
            assert erfc_log(float(x)) == pytest.approx(erfc_oracle_log(float(x)), rel=1e-12)

    def test_no_underflow_far_out(self):
        assert math.isfinite(erfc_log(150.0))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            erfc_log(math.inf)


class TestDawson:
    def test_zero(self):
        assert dawson(0.0) == 0.0

    def test_one_vs_taylor_oracle(self):
        ref = dawson_taylor(1.0)
        assert ref == pytest.approx(0.5380795069, abs=1e-10)
        assert dawson(1.0) == pytest.approx(ref, rel=1e-12)

    def test_odd(self):
        assert dawson(-1.0) == pytest.approx(-dawson(1.0), rel=1e-15)

    def test_taylor_grid(self):
        for x in np.linspace(-3, 3, 61):
            assert dawson(float(x)) == pytest.approx(dawson_taylor(float(x)), abs=1e-14, rel=1e-12)

    def test_ode_residual(self):
        # D'(x) + 2 x D(x) = 1, central difference with step 1e-5
        rng = np.random.Generator(np.random.Philox(key=11))
        xs = rng.uniform(-6, 6, 1000)
        h = 1e-5
        for x in xs:
            d_prime = (dawson(x + h) - dawson(x - h)) / (2 * h)
            assert abs(d_prime + 2 * x * dawson(x) - 1.0) <= 1e-9


class TestLogOneMinusIErfi:
    def test_zero(self):
        lc = log_one_minus_i_erfi(0.0)
        assert lc == LogComplex(0.0, 0.0)

    def test_conjugate_symmetry(self):
        for t in (0.3, 1.7, 4.0, 25.0, 80.0):
            a = log_one_minus_i_erfi(t)
            b = log_one_minus_i_erfi(-t)
            assert a.log_magnitude == pytest.approx(b.log_magnitude, rel=1e-14)
            assert a.phase == pytest.approx(-b.phase, rel=1e-14)

    def test_at_three_vs_erfi_oracle(self):
        e = erfi_series(3.0 / math.sqrt(2.0))
        lc = log_one_minus_i_erfi(3.0)
        assert lc.log_magnitude == pytest.approx(0.5 * math.log1p(e * e), rel=1e-12)
        assert lc.phase == pytest.approx(-math.atan(e), rel=1e-12)

    def test_agrees_with_direct_evaluation(self):
        for t in np.linspace(-2, 2, 41):
            if t == 0:
                continue
            e = erfi_series(float(t) / math.sqrt(2.0))
            direct = 1.0 - 1j * e
            got = log_one_minus_i_erfi(float(t)).exp()
            assert abs(got - direct) <= 1e-10 * abs(direct)

    def test_huge_argument_stays_finite(self):
        lc = log_one_minus_i_erfi(40.0)
        assert math.isfinite(lc.log_magnitude)
        assert lc.log_magnitude == pytest.approx(40.0 * 40.0 / 2.0, rel=1e-2)
        assert lc.phase == pytest.approx(-math.pi / 2.0, abs=1e-6)

    def test_packed_matches_scalar(self):
        ts = np.array([-5.0, -1.0, 0.0, 0.5, 3.0, 45.0])
        packed = log_one_minus_i_erfi_packed(ts)
        for t, z in zip(ts, packed):
            lc = log_one_minus_i_erfi(float(t))
            assert z.real == pytest.approx(lc.log_magnitude, abs=1e-13)
            assert z.imag == pytest.approx(lc.phase, abs=1e-13)


class TestLogBinomial:
    def test_small_exact(self):
        assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-15)

    def test_24_choose_5(self):
        assert exact_binom(24, 5) == 42504
        assert log_binomial(24, 5) == pytest.approx(math.log(42504), rel=1e-15)

    def test_out_of_range_sentinel(self):
        assert log_binomial(10, -1) == -math.inf
        assert log_binomial(10, 11) == -math.inf

    def test_symmetry(self):
        for n in (7, 33, 61, 200):
            for k in range(0, n + 1, max(1, n // 7)):
                assert log_binomial(n, k) == pytest.approx(log_binomial(n, n - k), rel=1e-13)

    def test_exp_is_integral_below_sixty(self):
        for n in (10, 37, 60):
            for k in range(n + 1):
                v = math.exp(log_binomial(n, k))
                assert abs(v - round(v)) <= 1e-9 * max(1.0, v)

    def test_large_vs_exact_integer(self):
        assert log_binomial(128, 47) == pytest.approx(math.log(exact_binom(128, 47)), rel=1e-13)

    def test_rejects_negative_n(self):
        with pytest.raises(ValueError):
            log_binomial(-1, 0)


class TestEntropyH:
    def test_half(self):
        assert entropy_H(0.5) == pytest.approx(-math.log(2), rel=1e-15)

    def test_endpoints(self):
        assert entropy_H(0.0) == 0.0
        assert entropy_H(1.0) == 0.0

    def test_quarter(self):
        ref = 0.25 * math.log(0.25) + 0.75 * math.log(0.75)
        assert ref == pytest.approx(-0.5623, abs=5e-5)
        assert entropy_H(0.25) == pytest.approx(ref, rel=1e-15)

    def test_symmetry(self):
        for x in np.linspace(0, 1, 101):
            assert entropy_H(float(x)) == pytest.approx(entropy_H(float(1 - x)), abs=1e-14)

    def test_range(self):
        for x in np.linspace(0, 1, 101):
            assert -math.log(2) - 1e-15 <= entropy_H(float(x)) <= 0.0

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            entropy_H(-0.01)
        with pytest.raises(ValueError):
            entropy_H(1.01)
