import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import expit

from pseudologit.data import summarize
from pseudologit.errors import BootstrapFailureError, DegenerateSampleError, DomainError
from pseudologit.estimation import fit_mle, method_of_moments
from pseudologit.inference import (
    ConfidenceInterval,
    NESTING_SLACK,
    SubModel,
    bootstrap,
    fit_restricted,
    lrt,
    wald_ci,
    wald_intervals,
)
from pseudologit.model import PAPER_PARAMS, ModelParams
from pseudologit.rng import RandomStream
from pseudologit.simulation import sample_dataset

EQUAL = ModelParams(2.0, 2.0, 1.0, 3.0, 2.0)
WALD_1_05 = (0.020018007729973, 1.979981992270027)


def _ratio_terms(resid, scale):
    return expit(-resid / scale)


def restricted_residuals(p, s, sub):
    """Score equations of each sub-model in ratio form, on the scale of score sums."""
    n, x, y = s.n, s.xs, s.ys
    r = y - p.alpha - p.beta * x
    ey = _ratio_terms(r, p.sigma1)
    ex = _ratio_terms(x - p.mu, p.sigma0)
    common = [n - 2 * ex.sum(), n - 2 * ey.sum(), n * x.mean() - 2 * np.sum(x * ey)]
    if sub is SubModel.EQUAL_SCALES:
        sigma = (y.mean() + x.mean() * (1 - p.beta) - p.alpha - p.mu) / 2 \
            - np.sum(r * ey) / n - np.sum((x - p.mu) * ex) / n
        return np.array(common + [n * (p.sigma1 - sigma)])
    if sub is SubModel.UNIT_MARGINAL_SCALE:
        sigma1 = y.mean() - x.mean() * p.beta - p.alpha - 2 / n * np.sum(r * ey)
        return np.array(common + [n * (p.sigma1 - sigma1)])
    sigma0 = x.mean() - p.mu - 2 / n * np.sum((x - p.mu) * ex)
    return np.array(common + [n * (p.sigma0 - sigma0)])


class TestFitRestricted:
    def test_equal_scales_recovers_common_scale(self):
        s = sample_dataset(EQUAL, 400, RandomStream(31))
        fit = fit_restricted(s, SubModel.EQUAL_SCALES)
        assert fit.converged
        assert fit.parameter_names == ("mu", "sigma", "alpha", "beta")
        assert fit.estimates.sigma0 == fit.estimates.sigma1
        z = (fit.free_values() - np.array([2.0, 2.0, 1.0, 3.0])) / fit.std_errors
        assert np.all(np.abs(z) < 4)

    @pytest.mark.parametrize("sub,pinned", [(SubModel.UNIT_MARGINAL_SCALE, "sigma0"),
                                            (SubModel.UNIT_CONDITIONAL_SCALE, "sigma1")])
    def test_pinned_scale(self, sub, pinned):
        s = sample_dataset(PAPER_PARAMS, 200, RandomStream(2))
        fit = fit_restricted(s, sub)
        assert getattr(fit.estimates, pinned) == 1.0
        assert pinned not in fit.parameter_names and fit.k == 4
        assert fit.std_errors.shape == (4,)

    def test_wilks_scale_under_null(self):
        p = ModelParams(2.0, 1.0, 1.0, 3.0, 2.0)
        gaps = []
        for rep in range(20):
            s = sample_dataset(p, 300, RandomStream(11, (rep,)))
            full = fit_mle(s, compute_se=False)
            res = fit_restricted(s, SubModel.UNIT_MARGINAL_SCALE, compute_se=False)
            gaps.append(full.loglik_at_estimate - res.loglik_at_estimate)
        gaps = np.array(gaps)
        assert np.all(gaps >= -NESTING_SLACK)
        assert np.all(gaps < 10.0)
        assert 0.1 < np.mean(gaps) < 1.5  # chi2(1)/2 has mean 0.5

    @pytest.mark.parametrize("sub", list(SubModel))
    def test_restricted_residuals(self, sub):
        s = sample_dataset(EQUAL, 300, RandomStream(8))
        fit = fit_restricted(s, sub)
        res = restricted_residuals(fit.estimates, s, sub)
        assert np.all(np.abs(res) < 1e-6 * s.n)

    def test_accepts_string_id(self):
        s = sample_dataset(EQUAL, 100, RandomStream(0))
        assert fit_restricted(s, "equal-scales").submodel is SubModel.EQUAL_SCALES

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            fit_restricted(summarize([1, 2, 3], [3, 1, 2]), SubModel.EQUAL_SCALES)


class TestLrt:
    def test_boundary_case(self):
        # rescale x so the unrestricted sigma0 estimate is exactly 1
        s = sample_dataset(PAPER_PARAMS, 300, RandomStream(17))
        s0 = fit_mle(s, compute_se=False).estimates.sigma0
        s = summarize(s.xs / s0, s.ys)
        res = lrt(s, SubModel.UNIT_MARGINAL_SCALE)
        assert res.statistic_T == pytest.approx(1.0, abs=1e-10)
        assert res.minus2logT == pytest.approx(0.0, abs=1e-10)
        assert res.p_value == pytest.approx(1.0, abs=1e-4)

    def test_power(self):
        s = sample_dataset(ModelParams(2.0, 3.0, 1.0, 3.0, 2.0), 500, RandomStream(23))
        res = lrt(s, SubModel.UNIT_MARGINAL_SCALE)
        assert res.p_value < 0.001

    @pytest.mark.parametrize("sub", list(SubModel))
    def test_invariants(self, sub):
        s = sample_dataset(PAPER_PARAMS, 150, RandomStream(5))
        res = lrt(s, sub, compute_se=False)
        assert res.converged and res.df == 1
        assert res.minus2logT == max(0.0, 2 * (res.unrestricted.loglik_at_estimate
                                               - res.restricted.loglik_at_estimate))
        assert 0.0 < res.statistic_T <= 1.0 + 1e-6
        assert res.statistic_T == pytest.approx(math.exp(res.log_T), rel=1e-15)

    def test_permutation_invariant(self):
        s = sample_dataset(EQUAL, 120, RandomStream(6))
        perm = np.random.default_rng(0).permutation(s.n)
        a = lrt(s, SubModel.EQUAL_SCALES, compute_se=False)
        b = lrt(summarize(s.xs[perm], s.ys[perm]), SubModel.EQUAL_SCALES, compute_se=False)
        assert a.minus2logT == pytest.approx(b.minus2logT, abs=1e-8)


class TestWald:
    def test_example(self):
        ci = wald_ci(1.0, 0.5, 0.95)
        assert (ci.lower, ci.upper) == pytest.approx(WALD_1_05, abs=1e-12)
        assert ci.method == "wald" and ci.level == 0.95

    def test_collapses(self):
        ci = wald_ci(3.25, 0.0)
        assert ci.lower == ci.upper == 3.25
        ci = wald_ci(3.25, 1e-300)
        assert ci.width < 1e-298

    @given(se=st.floats(1e-6, 1e6), level=st.floats(0.01, 0.999))
    def test_symmetric(self, se, level):
        ci = wald_ci(0.0, se, level)
        assert ci.lower == -ci.upper

    @pytest.mark.parametrize("level", [0.0, 1.0, -0.5, 1.5])
    def test_level_domain(self, level):
        with pytest.raises(DomainError):
            wald_ci(0.0, 1.0, level)

    def test_negative_se(self):
        with pytest.raises(DomainError):
            wald_ci(0.0, -1.0)

    def test_interval_ordering(self):
        with pytest.raises(DomainError):
            ConfidenceInterval(1.0, 0.0, 0.95, "wald")

    def test_intervals_for_fit(self, paper_sample_500):
        fit = fit_mle(paper_sample_500)
        cis = wald_intervals(fit)
        assert list(cis) == list(fit.parameter_names)
        assert cis["mu"].contains(fit.estimates.mu)


class TestBootstrap:
    def test_constant_estimator(self, paper_sample_500):
        res = bootstrap(paper_sample_500, lambda s: np.array([1.5, -2.0]), B=20, seed=1)
        assert np.all(res.se == 0)
        for ci in res.intervals.values():
            assert ci.lower == ci.upper
        assert res.intervals["theta0"].lower == 1.5

    def test_deterministic(self, paper_sample_500):
        est = lambda s: method_of_moments(s)  # noqa: E731
        a = bootstrap(paper_sample_500, est, B=50, seed=99)
        b = bootstrap(paper_sample_500, est, B=50, seed=99, workers=2)
        assert np.array_equal(a.replicates, b.replicates)
        assert a.parameter_names == ("mu", "sigma0", "alpha", "beta", "sigma1")
        c = bootstrap(paper_sample_500, est, B=50, seed=100)
        assert not np.array_equal(a.replicates, c.replicates)

    def test_se_matches_information(self, paper_sample_500):
        fit = fit_mle(paper_sample_500)
        res = bootstrap(paper_sample_500, lambda s: fit_mle(s, compute_se=False), B=200, seed=3)
        ratio = res.se[0] / fit.std_errors[0]
        assert 1 / 1.5 < ratio < 1.5

    def test_failures_counted(self, paper_sample_500):
        calls = iter(range(10 ** 6))

        def flaky(s):
            if next(calls) % 25 == 0:
                raise DegenerateSampleError("boom")
            return np.array([s.m1])

        res = bootstrap(paper_sample_500, flaky, B=50, seed=0, workers=1)
        assert res.n_failed == 2 and res.replicates.shape == (48, 1)

    def test_excessive_failures(self, paper_sample_500):
        def broken(s):
            raise DegenerateSampleError("boom")

        with pytest.raises(BootstrapFailureError):
            bootstrap(paper_sample_500, broken, B=10, seed=0)

    def test_b_minimum(self, paper_sample_500):
        with pytest.raises(DomainError):
            bootstrap(paper_sample_500, lambda s: s.m1, B=1)
