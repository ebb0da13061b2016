import math

import numpy as np
import pytest
from scipy import stats

from cewoc import (ConditionalAxis, ConfigError, DomainError, DosePair,
                   LinkKind, ModelParams, PosteriorDraws, PriorSpec,
                   SamplerConfig, StateError, TrialData, log_posterior,
                   posterior_quantile_gamma, quadrature_oracle,
                   sample_posterior)
from cewoc.posterior import gamma_per_draw
from .conftest import make_trial_data

TOY = [(0.0, 0.0, 0), (0.5, 0.5, 0), (0.7, 0.7, 0), (0.3, 0.9, 1),
       (0.9, 0.3, 1), (1.0, 1.0, 1)]

# median of U * min(U1, U2) for independent uniforms; frozen from a
# 10^7-triple Monte Carlo run (0.11096) and the CDF equation
# c^2 - 2 c ln c = 1/2 (0.11088)
RHO00_PRIOR_MEDIAN = 0.1109


def test_gamma_hyperparameters(prior):
    assert prior.gamma_shape == pytest.approx(441.0 / 540.0, abs=1e-12)
    assert prior.gamma_rate == pytest.approx(21.0 / 540.0, abs=1e-12)


def test_log_posterior_prior_only(prior):
    empty = TrialData(target_theta=0.33)
    p = ModelParams(0.1, 0.4, 0.6, 5.0)
    expected = (-math.log(0.4)
                + stats.gamma.logpdf(5.0, a=prior.gamma_shape,
                                     scale=1.0 / prior.gamma_rate))
    assert log_posterior(p, empty, prior) == pytest.approx(expected, abs=1e-10)
    q = ModelParams(0.1, 0.4, 0.6, 0.0, interaction_enabled=False)
    assert log_posterior(q, empty, prior) == pytest.approx(-math.log(0.4),
                                                           abs=1e-12)


def test_log_posterior_single_origin_dlt(prior):
    p = ModelParams(0.1, 0.4, 0.6, 5.0)
    empty = TrialData(target_theta=0.33)
    one = make_trial_data([(0.0, 0.0, 1)])
    delta = log_posterior(p, one, prior) - log_posterior(p, empty, prior)
    assert delta == pytest.approx(math.log(0.1), abs=1e-9)


def test_log_posterior_rejects_constraint_violations(prior):
    empty = TrialData(target_theta=0.33)
    assert log_posterior((0.5, 0.4, 0.6, 1.0), empty, prior,
                         link=LinkKind.LOGISTIC, interaction=True) == -math.inf
    assert log_posterior((0.1, 0.4, 0.6, -1.0), empty, prior,
                         link=LinkKind.LOGISTIC, interaction=True) == -math.inf


def test_sampler_determinism(prior, fast_sampler):
    data = make_trial_data(TOY)
    a = sample_posterior(data, prior, fast_sampler, LinkKind.LOGISTIC, True)
    b = sample_posterior(data, prior, fast_sampler, LinkKind.LOGISTIC, True)
    assert np.array_equal(a.values, b.values)
    assert a.acceptance_rates == b.acceptance_rates
    c = sample_posterior(data, prior, fast_sampler.with_seed(12),
                         LinkKind.LOGISTIC, True)
    assert not np.array_equal(a.values, c.values)


def test_sampler_respects_constraints(prior, fast_sampler):
    data = make_trial_data(TOY)
    for interaction in (True, False):
        d = sample_posterior(data, prior, fast_sampler, LinkKind.LOGISTIC,
                             interaction)
        rmin = np.minimum(d.rho01, d.rho10)
        assert np.all((d.rho00 > 0) & (d.rho00 < rmin) & (rmin < 1))
        if interaction:
            assert np.all(d.beta3 > 0)
        else:
            assert np.all(d.beta3 == 0.0)
            assert len(d.acceptance_rates) == 3


def test_prior_recovery_without_data(prior):
    cfg = SamplerConfig(n_iterations=220_000, n_burnin=20_000, thin=10, seed=42)
    d = sample_posterior(TrialData(target_theta=0.33), prior, cfg,
                         LinkKind.LOGISTIC, True)
    assert len(d) == 20_000
    assert d.beta3.mean() == pytest.approx(21.0, abs=1.5)
    assert stats.kstest(d.rho01, "uniform").statistic < 0.02
    assert stats.kstest(d.rho10, "uniform").statistic < 0.02
    assert np.median(d.rho00) == pytest.approx(RHO00_PRIOR_MEDIAN, abs=0.01)


def test_quadrature_prior_medians(prior):
    empty = TrialData(target_theta=0.33)
    med = quadrature_oracle(empty, prior, LinkKind.LOGISTIC, True,
                            (60, 60, 60, 100))
    assert med[1] == pytest.approx(0.5, abs=2e-3)
    assert med[2] == pytest.approx(0.5, abs=2e-3)
    assert med[0] == pytest.approx(RHO00_PRIOR_MEDIAN, abs=5e-3)
    beta_median = stats.gamma.ppf(0.5, a=prior.gamma_shape,
                                  scale=1.0 / prior.gamma_rate)
    assert med[3] == pytest.approx(beta_median, abs=0.2)
    med_flat = quadrature_oracle(empty, prior, LinkKind.LOGISTIC, False,
                                 (40, 40, 40, 40))
    assert med_flat[3] == 0.0
    assert med_flat[1] == pytest.approx(0.5, abs=3e-3)


def test_quadrature_guard_rails(prior):
    with pytest.raises(ConfigError):
        quadrature_oracle(TrialData(target_theta=0.33), prior,
                          LinkKind.LOGISTIC, True, (10, 60, 60, 60))
    big = make_trial_data([(0.1, 0.1, 0)] * 11)
    with pytest.raises(DomainError):
        quadrature_oracle(big, prior, LinkKind.LOGISTIC, True)


def test_mcmc_matches_quadrature_on_toy_data(prior):
    data = make_trial_data(TOY)
    cfg = SamplerConfig(n_iterations=600_000, n_burnin=60_000, thin=20, seed=5)
    draws = sample_posterior(data, prior, cfg, LinkKind.LOGISTIC, True)
    mcmc = np.median(draws.values, axis=0)
    quad = quadrature_oracle(data, prior, LinkKind.LOGISTIC, True,
                             (60, 60, 60, 120))
    assert np.max(np.abs(mcmc - np.array(quad))) <= 0.02


def _degenerate_draws(rows):
    vals = np.array(rows, dtype=float)
    return PosteriorDraws(values=vals, link=LinkKind.LOGISTIC,
                          interaction=True, acceptance_rates=(1.0,) * 4)


def test_quantile_degenerate_draws():
    d = _degenerate_draws([[0.01, 0.6, 0.6, 40.0]] * 25)
    g = gamma_per_draw(d, 0.33, ConditionalAxis.A_GIVEN_B, 0.0)[0]
    for alpha in (0.1, 0.5, 0.9):
        assert posterior_quantile_gamma(d, 0.33, ConditionalAxis.A_GIVEN_B,
                                        0.0, alpha) == pytest.approx(g, abs=1e-12)


def test_quantile_two_point_midpoint():
    d = _degenerate_draws([[0.01, 0.6, 0.50, 0.1], [0.01, 0.6, 0.70, 0.1]])
    gams = gamma_per_draw(d, 0.33, ConditionalAxis.A_GIVEN_B, 0.0)
    mid = posterior_quantile_gamma(d, 0.33, ConditionalAxis.A_GIVEN_B, 0.0, 0.5)
    assert mid == pytest.approx(float(np.mean(gams)), abs=1e-12)


def test_quantile_monotone_in_alpha(prior, fast_sampler):
    data = make_trial_data(TOY)
    d = sample_posterior(data, prior, fast_sampler, LinkKind.LOGISTIC, True)
    qs = [posterior_quantile_gamma(d, 0.33, ConditionalAxis.B_GIVEN_A, 0.3, a)
          for a in (0.1, 0.25, 0.5, 0.75)]
    assert all(a <= b + 1e-12 for a, b in zip(qs, qs[1:]))
    with pytest.raises(DomainError):
        posterior_quantile_gamma(d, 0.33, ConditionalAxis.B_GIVEN_A, 0.3, 1.5)


def test_posterior_concentrates_with_data(prior):
    truth = ModelParams(0.1, 0.3, 0.7, 0.0, interaction_enabled=False)
    rng = np.random.default_rng(2024)
    data = TrialData(target_theta=0.33)
    from cewoc import prob_dlt_xy
    for _ in range(40):
        x, y = rng.uniform(0.0, 1.0, 2)
        t = int(rng.random() < prob_dlt_xy(truth, x, y))
        data.add(DosePair(x, y), t)
    cfg = SamplerConfig(n_iterations=30_000, n_burnin=5_000, thin=5, seed=8)
    d = sample_posterior(data, prior, cfg, LinkKind.LOGISTIC, False)
    assert abs(np.median(d.rho10) - truth.rho10) < abs(0.5 - truth.rho10)
    assert abs(np.median(d.rho01) - truth.rho01) < abs(0.5 - truth.rho01)


def test_sampler_config_validation():
    with pytest.raises(ConfigError):
        SamplerConfig(n_iterations=100, n_burnin=50, thin=1)  # < 500 retained
    with pytest.raises(ConfigError):
        SamplerConfig(n_iterations=1000, n_burnin=1200, thin=1)
    with pytest.raises(ConfigError):
        PriorSpec(gamma_mean=-1.0)


def test_draws_validation():
    with pytest.raises(ConfigError):
        PosteriorDraws(values=np.empty((0, 4)), link=LinkKind.LOGISTIC,
                       interaction=True, acceptance_rates=())
    bad = np.array([[0.5, 0.4, 0.6, 1.0]])
    with pytest.raises(ConfigError):
        PosteriorDraws(values=bad, link=LinkKind.LOGISTIC, interaction=True,
                       acceptance_rates=(1.0,))
