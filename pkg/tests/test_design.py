import numpy as np
import pytest

from cewoc import (ConfigError, DesignConfig, DosePair, LinkKind, ModelParams,
                   PosteriorDraws, PriorSpec, ReparamLinkTruth, SamplerConfig,
                   StateError, TrialData, TrialStatus, check_stopping,
                   estimate_mtd_curve, first_cohort, gamma_a_given_b,
                   new_trial, next_cohort_doses, record_cohort_outcomes,
                   run_trial, scenario, schedule_alpha)

DESIGN = DesignConfig(theta=0.33, n_max=40)
FAST = SamplerConfig(n_iterations=1600, n_burnin=500, thin=2, seed=3)


def _draws_from_rows(rows, interaction=True):
    return PosteriorDraws(values=np.array(rows, dtype=float),
                          link=LinkKind.LOGISTIC, interaction=interaction,
                          acceptance_rates=(1.0,) * (4 if interaction else 3))


def test_design_config_validation():
    with pytest.raises(ConfigError):
        DesignConfig(theta=0.33, n_max=41)
    with pytest.raises(ConfigError):
        DesignConfig(theta=0.33, n_max=40, alpha_start=0.6)
    with pytest.raises(ConfigError):
        DesignConfig(theta=0.33, n_max=40, stop_n1=50)


def test_first_cohort_at_minimum_combination():
    assert first_cohort(DESIGN) == (DosePair(0.0, 0.0), DosePair(0.0, 0.0))
    state = new_trial(DESIGN)
    assert state.next_cohort_index == 2
    assert state.current_alpha == DESIGN.alpha_start
    assert state.status is TrialStatus.ENROLLING


def test_alpha_schedule():
    assert schedule_alpha(DESIGN, 2) == pytest.approx(0.25)
    assert schedule_alpha(DESIGN, 3) == pytest.approx(0.30)
    assert schedule_alpha(DESIGN, 6) == pytest.approx(0.45)
    assert schedule_alpha(DESIGN, 7) == pytest.approx(0.50)
    assert schedule_alpha(DESIGN, 12) == pytest.approx(0.50)


def test_step_cap_applies_to_fresh_coordinate():
    # all draws identical; unclipped conditional MTD of drug A at y=0 is 0.9
    rho10 = 1.0 / (1.0 + np.exp(0.2763407))  # logit^-1(-0.2763407) ~ 0.43136
    row = [0.01, 0.6, rho10, 0.0]
    draws = _draws_from_rows([row] * 50)
    state = new_trial(DESIGN)
    state.pending_doses = None
    state.data.add(DosePair(0.1, 0.0), 0)
    state.data.add(DosePair(0.0, 0.1), 0)
    q = gamma_a_given_b(ModelParams(*row), 0.33, 0.0)
    assert q == pytest.approx(0.9, abs=1e-4)
    d1, d2 = next_cohort_doses(state, draws, DESIGN)
    assert d1.x == pytest.approx(0.30, abs=1e-6)  # capped from 0.9
    assert d1.y == 0.0  # inherited from patient 1
    assert d2.x == 0.0  # inherited from patient 2
    assert state.next_cohort_index == 3
    assert state.current_alpha == pytest.approx(0.25)


def test_parity_structure_of_inheritance(prior):
    from cewoc import sample_posterior
    state = new_trial(DESIGN)
    rng = np.random.default_rng(1)
    for cohort in range(2, 8):
        record_cohort_outcomes(state, int(rng.random() < 0.2),
                               int(rng.random() < 0.2))
        draws = sample_posterior(state.data, prior, FAST, LinkKind.LOGISTIC,
                                 True, seed=(7, cohort))
        prev_a, prev_b = state.data.records[-2], state.data.records[-1]
        d1, d2 = next_cohort_doses(state, draws, DESIGN)
        if cohort % 2 == 0:
            assert d1.y == prev_a.dose.y  # patient 2i-1 inherits y
            assert d2.x == prev_b.dose.x  # patient 2i inherits x
        else:
            assert d1.x == prev_a.dose.x
            assert d2.y == prev_b.dose.y
    # every allocation respected the EWOC slack bound
    assert len(state.audit) == 12
    for entry in state.audit:
        assert entry.frac_draws_below <= entry.alpha + 1.0 / entry.n_draws + 1e-12


def test_next_cohort_requires_resolved_outcomes():
    state = new_trial(DESIGN)
    draws = _draws_from_rows([[0.01, 0.6, 0.6, 40.0]] * 10)
    with pytest.raises(StateError):
        next_cohort_doses(state, draws, DESIGN)  # cohort 1 still pending


def test_check_stopping_thresholds():
    data = TrialData(target_theta=0.33)
    for _ in range(5):
        data.add(DosePair(0, 0), 1)
        data.add(DosePair(0, 0), 1)
    calm = _draws_from_rows([[0.01, 0.6, 0.6, 40.0]] * 100)
    hot = _draws_from_rows([[0.90, 0.95, 0.95, 1.0]] * 100)
    cfg = DesignConfig(theta=0.33, n_max=40, stop_n1=10, stop_xi1=0.05,
                       stop_xi2=0.80)
    assert check_stopping(data, calm, cfg) is False
    assert check_stopping(data, hot, cfg) is True
    # exactly xi2 of the draws above the threshold: strict inequality holds
    rows = [[0.90, 0.95, 0.95, 1.0]] * 80 + [[0.01, 0.6, 0.6, 1.0]] * 20
    boundary = _draws_from_rows(rows)
    assert check_stopping(data, boundary, cfg) is False
    short = TrialData(target_theta=0.33)
    short.add(DosePair(0, 0), 0)
    with pytest.raises(StateError):
        check_stopping(short, calm, cfg)


def test_estimate_mtd_curve_medians():
    d = _draws_from_rows([[0.01, 0.6, 0.6, 40.0]] * 9)
    est = estimate_mtd_curve(d, 0.33)
    assert (est.rho00_hat, est.rho01_hat, est.rho10_hat, est.beta3_hat) == \
        (0.01, 0.6, 0.6, 40.0)
    rows = [[0.01 + d0, 0.6 + d0, 0.6 - d0, 40.0 + 10 * d0]
            for d0 in (-0.005, 0.0, 0.005)]
    est2 = estimate_mtd_curve(_draws_from_rows(rows), 0.33)
    assert est2.rho00_hat == pytest.approx(0.01)
    assert est2.beta3_hat == pytest.approx(40.0)
    no_int = _draws_from_rows([[0.05, 0.3, 0.4, 0.0]] * 5, interaction=False)
    est3 = estimate_mtd_curve(no_int, 0.33)
    assert est3.beta3_hat == 0.0
    assert est3.as_params().interaction_enabled is False


def test_run_trial_deterministic_and_contained(prior):
    cfg = DesignConfig(theta=0.33, n_max=8, stop_n1=8)
    a = run_trial(scenario("s1"), cfg, prior, FAST, LinkKind.LOGISTIC, True,
                  seed=77)
    b = run_trial(scenario("s1"), cfg, prior, FAST, LinkKind.LOGISTIC, True,
                  seed=77)
    assert [(r.dose.x, r.dose.y, r.dlt) for r in a.data.records] == \
        [(r.dose.x, r.dose.y, r.dlt) for r in b.data.records]
    assert a.estimate == b.estimate
    assert len(a.data) == 8  # 4 cohorts of two when no stop
    for rec in a.data.records:
        assert 0.0 <= rec.dose.x <= 1.0 and 0.0 <= rec.dose.y <= 1.0
    assert a.last_cohort_doses == (a.data.records[-2].dose,
                                   a.data.records[-1].dose)


def test_run_trial_step_cap_lineage(prior):
    cfg = DesignConfig(theta=0.33, n_max=16, stop_n1=16)
    res = run_trial(scenario("s1"), cfg, prior, FAST, LinkKind.LOGISTIC, True,
                    seed=31)
    recs = res.data.records
    for i in range(2, len(recs) // 2 + 1):
        p_new, p_prev = recs[2 * i - 2], recs[2 * i - 4]  # 2i-1 vs 2i-3
        q_new, q_prev = recs[2 * i - 1], recs[2 * i - 3]  # 2i vs 2i-2
        if i % 2 == 0:
            assert p_new.dose.x - p_prev.dose.x <= cfg.escalation_step_cap + 1e-12
            assert q_new.dose.y - q_prev.dose.y <= cfg.escalation_step_cap + 1e-12
        else:
            assert p_new.dose.y - p_prev.dose.y <= cfg.escalation_step_cap + 1e-12
            assert q_new.dose.x - q_prev.dose.x <= cfg.escalation_step_cap + 1e-12


def test_run_trial_stops_on_extreme_toxicity(prior):
    hot = ReparamLinkTruth(ModelParams(0.99, 0.9905, 0.9905, 0.0,
                                       interaction_enabled=False))
    cfg = DesignConfig(theta=0.33, n_max=40, stop_n1=10)
    res = run_trial(hot, cfg, prior, FAST, LinkKind.LOGISTIC, True, seed=5)
    assert res.status is TrialStatus.STOPPED_FOR_SAFETY
    assert len(res.data) <= 12
    assert res.estimate is not None
