import math

import numpy as np
import pytest

from l1exact.exactprob import ProblemDims, Variant, p_err
from l1exact.montecarlo import (
    ErrorRateEstimate,
    TrialConfig,
    estimate,
    face_survival_trial,
    gen_instance,
    nullspace_failure_check,
    recover_positive,
    recover_standard,
    wilson_interval,
)

_Z999 = 3.2905267314919255


class TestGenInstance:
    def test_scalar_instance(self):
        a, x, y = gen_instance(ProblemDims(1, 1, 1), 0, 5)
        assert a.shape == (1, 1)
        assert y[0] == pytest.approx(a[0, 0] * x[0], rel=1e-15)

    def test_bit_identical_replay(self):
        a1, x1, y1 = gen_instance(ProblemDims(3, 5, 8), 17, 999)
        a2, x2, y2 = gen_instance(ProblemDims(3, 5, 8), 17, 999)
        assert np.array_equal(a1, a2) and np.array_equal(x1, x2) and np.array_equal(y1, y2)

    def test_distinct_trials_differ(self):
        a1, _, _ = gen_instance(ProblemDims(3, 5, 8), 0, 999)
        a2, _, _ = gen_instance(ProblemDims(3, 5, 8), 1, 999)
        assert not np.array_equal(a1, a2)

    def test_support_and_magnitudes(self):
        _, x, _ = gen_instance(ProblemDims(4, 6, 9), 3, 11, 0.5, 1.5)
        assert (x[:4] >= 0.5).all() and (x[:4] <= 1.5).all()
        assert (x[4:] == 0).all()

    def test_gaussian_column_means(self):
        # sample means over many trials stay within 4 sigma of zero
        trials, n = 100_000, 5
        acc = np.zeros(n)
        for i in range(trials):
            a, _, _ = gen_instance(ProblemDims(1, 1, n), i, 2024)
            acc += a[0]
        se = 1.0 / math.sqrt(trials)
        assert np.abs(acc / trials).max() <= 4 * se


class TestRecovery:
    def test_trivial_dims_always_recover(self):
        for i in range(20):
            a, x, y = gen_instance(ProblemDims(1, 1, 1), i, 31)
            assert np.abs(recover_positive(a, y) - x).max() <= 1e-9

    def test_identity_matrix_positive(self):
        x = np.array([1.0, 0.7, 0.0, 0.0])
        a = np.eye(4)
        assert np.abs(recover_positive(a, a @ x) - x).max() <= 1e-10

    def test_identity_matrix_standard(self):
        x = np.array([0.9, -0.0, 1.4, 0.0])
        a = np.eye(4)
        assert np.abs(recover_standard(a, a @ x) - x).max() <= 1e-10


class TestFaceSurvival:
    def test_full_support_always_survives(self):
        a, x, _ = gen_instance(ProblemDims(3, 3, 3), 0, 8)
        assert face_survival_trial(a, x) is True

    def test_generic_case_runs(self):
        a, x, _ = gen_instance(ProblemDims(3, 5, 8), 2, 8)
        assert face_survival_trial(a, x) in (True, False)


class TestNullspaceCheck:
    def test_square_system_never_fails(self):
        a, _, _ = gen_instance(ProblemDims(2, 4, 4), 0, 12)
        assert nullspace_failure_check(a, 2) is False

    def test_1_1_2_failure_rate_is_half(self):
        # the normalized witness scans both signs of the null direction, so
        # the event is |v1| >= |v2|, probability 1/2
        hits = sum(
            nullspace_failure_check(gen_instance(ProblemDims(1, 1, 2), i, 77)[0], 1)
            for i in range(2000)
        )
        lo, hi = wilson_interval(hits, 2000, z=_Z999)
        assert lo <= 0.5 <= hi

    def test_agrees_with_recovery(self):
        dims = ProblemDims(6, 16, 40)
        agree = checked = 0
        for i in range(250):
            a, x, y = gen_instance(dims, i, 4242)
            failed_lp = np.abs(recover_standard(a, y) - x).max() > 1e-6 * max(1.0, x.max())
            # skip trials whose witness optimum rides the tie boundary
            from l1exact.linprog import solve  # noqa: F401  (tie margin via rerun)
            failed_cond = nullspace_failure_check(a, dims.k)
            checked += 1
            agree += failed_lp == failed_cond
        assert agree / checked >= 0.99


class TestWilson:
    def test_bounds_order_and_range(self):
        lo, hi = wilson_interval(3, 10)
        assert 0.0 <= lo <= 0.3 <= hi <= 1.0

    def test_extremes(self):
        lo, hi = wilson_interval(0, 50)
        assert lo == 0.0 and hi > 0.0
        lo, hi = wilson_interval(50, 50)
        assert hi == 1.0 and lo < 1.0

    def test_rejects_no_trials(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0)


class TestEstimate:
    def test_single_trial_well_formed(self):
        est = estimate(TrialConfig(dims=ProblemDims(2, 3, 5), variant=Variant.POSITIVE_L1, trials=1, seed=4))
        assert est.p_hat in (0.0, 1.0)
        assert 0.0 <= est.ci_low <= est.p_hat <= est.ci_high <= 1.0

    def test_deterministic_across_threads(self):
        cfg = TrialConfig(dims=ProblemDims(3, 5, 8), variant=Variant.POSITIVE_SIMPLEX, trials=400, seed=5)
        a = estimate(cfg, threads=1)
        b = estimate(cfg, threads=3)
        assert a == b

    def test_magnitude_rescaling_invariance(self):
        dims = ProblemDims(3, 5, 8)
        base = TrialConfig(dims=dims, variant=Variant.POSITIVE_L1, trials=3000, seed=21)
        wide = TrialConfig(
            dims=dims, variant=Variant.POSITIVE_L1, trials=3000, seed=22,
            magnitude_low=0.1, magnitude_high=10.0,
        )
        ea, eb = estimate(base), estimate(wide)
        se = math.sqrt(
            ea.p_hat * (1 - ea.p_hat) / ea.trials + eb.p_hat * (1 - eb.p_hat) / eb.trials
        )
        assert abs(ea.p_hat - eb.p_hat) <= 3 * se

    def test_matches_exact_value_positive(self):
        dims = ProblemDims(3, 5, 8)
        est = estimate(TrialConfig(dims=dims, variant=Variant.POSITIVE_L1, trials=3000, seed=77))
        lo, hi = wilson_interval(est.failures, est.trials, z=_Z999)
        assert lo <= p_err(Variant.POSITIVE_L1, dims).value <= hi

    def test_crosspolytope_variant_runs_standard_recovery(self):
        dims = ProblemDims(2, 3, 6)
        a = estimate(TrialConfig(dims=dims, variant=Variant.CROSSPOLYTOPE, trials=500, seed=9))
        b = estimate(TrialConfig(dims=dims, variant=Variant.STANDARD_L1, trials=500, seed=9))
        assert a == b

    def test_empirical_sandwich(self):
        # survival failure <= positive-l1 failure <= survival failure at n+1
        trials, seed = 4000, 313
        cfgs = [
            TrialConfig(dims=ProblemDims(3, 5, 8), variant=Variant.POSITIVE_SIMPLEX, trials=trials, seed=seed),
            TrialConfig(dims=ProblemDims(3, 5, 8), variant=Variant.POSITIVE_L1, trials=trials, seed=seed),
            TrialConfig(dims=ProblemDims(3, 5, 9), variant=Variant.POSITIVE_SIMPLEX, trials=trials, seed=seed),
        ]
        lo_e, mid_e, hi_e = (estimate(c) for c in cfgs)

        def se(e):
            return math.sqrt(max(e.p_hat * (1 - e.p_hat), 1e-9) / e.trials)

        assert lo_e.p_hat <= mid_e.p_hat + 3 * (se(lo_e) + se(mid_e))
        assert mid_e.p_hat <= hi_e.p_hat + 3 * (se(mid_e) + se(hi_e))

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            TrialConfig(dims=ProblemDims(2, 3, 5), variant=Variant.POSITIVE_L1, trials=0, seed=1)
        with pytest.raises(ValueError):
            TrialConfig(dims=ProblemDims(2, 3, 5), variant=Variant.POSITIVE_L1, trials=5, seed=1, magnitude_low=0.0)
