import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit

from pseudologit.data import summarize
from pseudologit.errors import DegenerateSampleError, DomainError, NonPositiveScaleError, SingularInformationError
from pseudologit.estimation import (
    FitMethod,
    SolverOptions,
    fit_mle,
    fit_mle_paper_hybrid,
    method_of_moments,
    newton_step_location,
    observed_information,
    standard_errors,
)
from pseudologit.model import PAPER_PARAMS, ModelParams, correlation, loglik
from pseudologit.rng import RandomStream
from pseudologit.simulation import sample_dataset

SQRT3_OVER_PI = 0.551328895421792
SQRT6_OVER_PI = 0.779696801233676
PAPER_MOM_SIGMA1_LIMIT = 7.615773105863908  # sqrt(3 (85 pi^2/3 - 9 pi^2)) / pi


def paper_residuals(p, s):
    """Stationarity equations written in the ratio form e/(1+e), e = exp(-z).

    The two scale equations are returned multiplied by ``n`` so every entry
    is on the scale of a score sum.
    """
    n, x, y = s.n, s.xs, s.ys
    ex = expit(-(x - p.mu) / p.sigma0)
    r = y - p.alpha - p.beta * x
    ey = expit(-r / p.sigma1)
    return np.array([
        n - 2 * ex.sum(),
        n * (p.sigma0 - (x.mean() - p.mu - 2 / n * np.sum((x - p.mu) * ex))),
        n - 2 * ey.sum(),
        n * x.mean() - 2 * np.sum(x * ey),
        n * (p.sigma1 - (y.mean() - p.beta * x.mean() - p.alpha - 2 / n * np.sum(r * ey))),
    ])


class TestSummarize:
    def test_two_point_example(self):
        s = summarize([0, 2], [0, 4])
        assert (s.m1, s.m2, s.s1_sq, s.s12, s.s2_sq, s.r_xy) == (1, 2, 1, 2, 4, 1)

    def test_constant_x_is_degenerate(self):
        s = summarize([3, 3, 3], [1, 2, 3])
        assert s.s1_sq == 0 and s.degenerate and math.isnan(s.r_xy)
        with pytest.raises(DegenerateSampleError):
            s.pearson()

    @pytest.mark.parametrize("xs,ys", [([1, 2], [1]), ([], []), ([1, math.nan], [1, 2]), ([1, 2], [math.inf, 0])])
    def test_invalid(self, xs, ys):
        with pytest.raises(DomainError):
            summarize(xs, ys)

    @given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=2, max_size=40))
    def test_moments_recomputable(self, pairs):
        xs, ys = np.array(pairs).T
        s = summarize(xs, ys)
        assert s.s1_sq == pytest.approx(np.var(xs), rel=1e-9, abs=1e-12)
        assert s.s12 == pytest.approx(np.mean((xs - xs.mean()) * (ys - ys.mean())), rel=1e-9, abs=1e-9)
        if s.s1_sq > 1e-6 and s.s2_sq > 1e-6:
            assert s.r_xy == pytest.approx(s.s12 / math.sqrt(s.s1_sq * s.s2_sq), rel=1e-12, abs=1e-12)


class TestMethodOfMoments:
    def test_two_point_paper_variant(self):
        est = method_of_moments(summarize([0, 2], [0, 4]), "paper").estimates
        assert est.mu == 1 and est.beta == 2 and est.alpha == 0
        assert est.sigma0 == pytest.approx(SQRT3_OVER_PI, rel=1e-14)
        assert est.sigma1 == pytest.approx(SQRT6_OVER_PI, rel=1e-14)

    def test_two_point_corrected_variant_fails(self):
        with pytest.raises(NonPositiveScaleError):
            method_of_moments(summarize([0, 2], [0, 4]), "corrected")

    def test_zero_x_variance(self):
        with pytest.raises(DegenerateSampleError):
            method_of_moments(summarize([1, 1, 1], [0, 1, 2]))

    def test_no_standard_errors(self):
        fit = method_of_moments(summarize([0, 1, 3, 4], [1, 0, 5, 2]))
        assert fit.std_errors is None and fit.method is FitMethod.MOM_CORRECTED

    def test_large_sample(self):
        s = sample_dataset(PAPER_PARAMS, 100_000, RandomStream(77))
        paper = method_of_moments(s, "paper").estimates
        corrected = method_of_moments(s, "corrected").estimates
        assert paper.sigma1 == pytest.approx(PAPER_MOM_SIGMA1_LIMIT, abs=0.15)
        assert 6.8 <= paper.sigma1 <= 7.8
        assert paper.sigma1 - 2.0 > 5.0
        assert corrected.sigma1 == pytest.approx(2.0, rel=0.05)

    def test_consistency(self):
        truth = PAPER_PARAMS.to_array()
        errors = []
        for k, n in enumerate((1_000, 10_000, 100_000)):
            est = np.array([method_of_moments(sample_dataset(PAPER_PARAMS, n, RandomStream(500 + k, (r,))))
                            .estimates.to_array() for r in range(8)])
            errors.append(np.sqrt(np.mean((est - truth) ** 2, axis=0)))
        errors = np.array(errors)
        assert np.all(errors.max(axis=1)[1:] < errors.max(axis=1)[:-1])
        final = errors[-1]
        assert np.all(final[[1, 4]] / truth[[1, 4]] < 0.05)
        assert np.all(final[[0, 2]] < 0.1)


class TestFitMle:
    def test_recovers_truth(self, paper_sample_500):
        fit = fit_mle(paper_sample_500)
        assert fit.converged and fit.method is FitMethod.MLE_QUASI_NEWTON
        z = (fit.estimates.to_array() - PAPER_PARAMS.to_array()) / fit.std_errors
        assert np.all(np.abs(z) < 4)
        assert fit.grad_norm < 1e-8 * paper_sample_500.n

    def test_independence_case(self):
        p = ModelParams(0.0, 1.5, 2.0, 0.0, 1.0)
        fit = fit_mle(sample_dataset(p, 400, RandomStream(9)))
        assert abs(fit.estimates.beta) < 4 * fit.std_errors[3]
        assert abs(correlation(fit.estimates)) < 0.1

    def test_paper_form_residuals(self, paper_sample_500):
        fit = fit_mle(paper_sample_500)
        assert np.all(np.abs(paper_residuals(fit.estimates, paper_sample_500)) < 1e-6 * paper_sample_500.n)

    def test_improves_on_start(self, paper_sample_500):
        start = ModelParams(0.0, 1.0, 0.0, 1.0, 1.0)
        fit = fit_mle(paper_sample_500, init=start)
        assert fit.converged
        assert fit.loglik_at_estimate >= loglik(start, paper_sample_500)
        np.testing.assert_allclose(fit.estimates.to_array(), fit_mle(paper_sample_500).estimates.to_array(),
                                   atol=1e-6)

    def test_iteration_cap_reports_failure(self, paper_sample_500):
        fit = fit_mle(paper_sample_500, init=ModelParams(0, 1, 0, 0, 1), opts=SolverOptions(max_iter=1),
                      compute_se=False)
        assert not fit.converged and fit.iterations == 1

    def test_trace(self, paper_sample_500):
        sink = io.StringIO()
        fit_mle(paper_sample_500, opts=SolverOptions(verbose=True, trace=sink))
        lines = []
        fit_mle(paper_sample_500, opts=SolverOptions(verbose=True, trace=lines.append))
        assert sink.getvalue().count("\n") == len(lines) > 0

    @pytest.mark.parametrize("xs,ys", [
        (np.arange(5.0), np.arange(5.0) ** 2),          # too small
        (np.ones(10), np.arange(10.0)),                 # constant x
        (np.arange(10.0), 3 * np.arange(10.0) + 1),     # collinear
    ])
    def test_degenerate(self, xs, ys):
        with pytest.raises(DegenerateSampleError):
            fit_mle(summarize(xs, ys))

    def test_permutation_invariance(self, paper_sample_500):
        perm = np.random.default_rng(1).permutation(500)
        a = fit_mle(paper_sample_500).estimates.to_array()
        b = fit_mle(summarize(paper_sample_500.xs[perm], paper_sample_500.ys[perm])).estimates.to_array()
        np.testing.assert_allclose(a, b, atol=1e-10, rtol=0)

    @pytest.mark.parametrize("c", [-7.5, 0.25, 40.0])
    def test_shift_equivariance(self, paper_sample_500, c):
        s = paper_sample_500
        a = fit_mle(s).estimates
        b = fit_mle(summarize(s.xs + c, s.ys)).estimates
        assert b.mu == pytest.approx(a.mu + c, abs=1e-6)
        assert b.alpha == pytest.approx(a.alpha - a.beta * c, abs=1e-6)
        for name in ("sigma0", "beta", "sigma1"):
            assert getattr(b, name) == pytest.approx(getattr(a, name), abs=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2 ** 32), n=st.integers(20, 300))
    def test_mle_beats_mom(self, seed, n):
        s = sample_dataset(PAPER_PARAMS, n, RandomStream(seed))
        fit = fit_mle(s, compute_se=False)
        for variant in ("paper", "corrected"):
            try:
                mom = method_of_moments(s, variant)
            except NonPositiveScaleError:
                continue
            assert fit.loglik_at_estimate >= mom.loglik_at_estimate


class TestPaperHybrid:
    def test_agrees_with_quasi_newton(self):
        for seed in range(20):
            s = sample_dataset(PAPER_PARAMS, 200, RandomStream(seed))
            hybrid = fit_mle_paper_hybrid(s, compute_se=False)
            assert hybrid.converged
            ref = fit_mle(s, compute_se=False)
            np.testing.assert_allclose(hybrid.estimates.to_array(), ref.estimates.to_array(), atol=1e-4, rtol=0)

    def test_newton_fixed_point(self):
        x = sample_dataset(PAPER_PARAMS, 300, RandomStream(3)).xs
        mu = float(np.median(x))
        for _ in range(50):
            mu += newton_step_location(x - mu, 3.0)
        assert abs(newton_step_location(x - mu, 3.0)) < 1e-10

    def test_stress_small_samples(self):
        methods = set()
        for rep in range(1000):
            s = sample_dataset(PAPER_PARAMS, 30, RandomStream(4242, (rep,)))
            fit = fit_mle_paper_hybrid(s, compute_se=False)
            if fit.method is FitMethod.MLE_PAPER_HYBRID:
                assert fit.converged
            else:
                assert fit.method is FitMethod.MLE_QUASI_NEWTON and fit.note
            if fit.converged:
                assert fit.grad_norm < 1e-8 * s.n
            methods.add(fit.method)
        assert FitMethod.MLE_PAPER_HYBRID in methods


class TestInformation:
    def test_symmetric_and_positive_definite(self, paper_sample_500):
        fit = fit_mle(paper_sample_500)
        info = observed_information(fit.estimates, paper_sample_500)
        assert np.array_equal(info, info.T)
        assert np.all(np.linalg.eigvalsh(info) > 0)

    @pytest.mark.parametrize("beta", [0.0, 2.5])
    def test_block_structure(self, beta):
        p = ModelParams(1.0, 2.0, -1.0, beta, 1.5)
        s = sample_dataset(p, 300, RandomStream(5))
        info = observed_information(p, s)
        scale = np.max(np.abs(np.diag(info)))
        assert np.max(np.abs(info[np.ix_([0, 1], [2, 3, 4])])) < 1e-3 * scale

    def test_standard_error_examples(self):
        np.testing.assert_allclose(standard_errors(np.eye(5)), np.ones(5), rtol=1e-15)
        np.testing.assert_allclose(standard_errors(np.diag([4.0, 9, 16, 25, 36])),
                                   [0.5, 1 / 3, 0.25, 0.2, 1 / 6], rtol=1e-15)

    def test_non_positive_definite(self):
        with pytest.raises(SingularInformationError):
            standard_errors(np.diag([1.0, 1, -1, 1, 1]))
        with pytest.raises(SingularInformationError):
            standard_errors(np.zeros((5, 5)))

    def test_se_scale_matches_reference(self, paper_sample_500):
        se_mu = fit_mle(paper_sample_500).std_errors[0]
        assert 0.228 / 2 < se_mu < 0.228 * 2

    def test_standard_errors_positive(self, paper_sample_500):
        assert np.all(fit_mle(paper_sample_500).std_errors > 0)
