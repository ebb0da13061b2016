import math

import numpy as np
import pytest

from cewoc import (DomainError, DosePair, LinkKind, ModelParams,
                   ReparamLinkTruth, SixParameterTruth, draw_outcome,
                   scenario, shifted_link_truth, true_curve_grid,
                   true_mtd_curve_points, truth_prob_dlt, truth_prob_dlt_xy)

S4 = SixParameterTruth(0.5, 0.5, 2.0, 12.0, 5.0, 0.1)


def test_six_parameter_corners():
    assert truth_prob_dlt(S4, DosePair(0, 0)) == 0.0
    assert truth_prob_dlt(S4, DosePair(1, 1)) == pytest.approx(0.75, abs=1e-12)


def test_six_parameter_edge_solution():
    # at x=0 the curve satisfies 0.5 y^5 = 1/0.67 - 1
    closed_form = ((1.0 / 0.67 - 1.0) / 0.5) ** 0.2
    pts = true_mtd_curve_points(S4, 0.33, 2001)
    assert pts[0].x == pytest.approx(0.0)
    assert pts[0].y == pytest.approx(closed_form, abs=1e-9)
    assert pts[0].y == pytest.approx(0.9969969, abs=1e-6)


def test_scenario_presets_reference_row():
    s1 = scenario("s1")
    assert isinstance(s1, ReparamLinkTruth)
    assert truth_prob_dlt(s1, DosePair(0, 0)) == pytest.approx(0.01, abs=1e-12)
    assert s1.params.beta3 == 40.0
    assert scenario("s2").params.rho10 == 0.9
    assert scenario("s3").params.rho00 == 0.001
    assert isinstance(scenario("s4"), SixParameterTruth)
    with pytest.raises(DomainError):
        scenario("s9")


@pytest.mark.parametrize("name", ["s1", "s2", "s3", "s4"])
def test_truth_monotone_on_grid(name):
    truth = scenario(name)
    g = np.linspace(0.0, 1.0, 101)
    surface = truth_prob_dlt_xy(truth, g[:, None], g[None, :])
    assert np.all(np.diff(surface, axis=0) >= -1e-12)
    assert np.all(np.diff(surface, axis=1) >= -1e-12)


def test_shift_identity_for_logistic(scenario1_params):
    assert shifted_link_truth(scenario1_params, LinkKind.LOGISTIC,
                              0.33) is scenario1_params


@pytest.mark.parametrize("name", ["s1", "s2", "s3"])
@pytest.mark.parametrize("target", [LinkKind.PROBIT, LinkKind.CLOGLOG])
def test_shifted_truth_shares_curve(name, target):
    theta = 0.33
    base = scenario(name).params
    shifted = shifted_link_truth(base, target, theta)
    assert shifted.link is target
    assert shifted.beta3 == base.beta3
    xs, ys = true_curve_grid(ReparamLinkTruth(base), theta, 21)
    probs = truth_prob_dlt_xy(ReparamLinkTruth(shifted), xs, ys)
    assert np.max(np.abs(probs - theta)) <= 1e-9


def test_shift_requires_logistic_base():
    probit_base = ModelParams(0.01, 0.6, 0.6, 40.0, LinkKind.PROBIT)
    with pytest.raises(DomainError):
        shifted_link_truth(probit_base, LinkKind.CLOGLOG, 0.33)


@pytest.mark.parametrize("name", ["s1", "s2", "s3", "s4"])
def test_curve_points_monotone_decreasing(name):
    pts = true_mtd_curve_points(scenario(name), 0.33, 201)
    ys = np.array([p.y for p in pts])
    assert len(pts) > 10
    assert np.all(np.diff(ys) <= 1e-9)


def test_curve_points_on_curve_to_tolerance():
    for name in ("s1", "s4"):
        truth = scenario(name)
        pts = true_mtd_curve_points(truth, 0.33, 101)
        probs = np.array([truth_prob_dlt(truth, p) for p in pts])
        assert np.max(np.abs(probs - 0.33)) <= 1e-9


def test_true_curve_grid_spans_valid_subinterval():
    xs, ys = true_curve_grid(scenario("s2"), 0.33, 201)
    assert len(xs) == 201
    assert np.all((ys >= 0.0) & (ys <= 1.0))
    # scenario 2 starts above the square: the grid must start at y ~ 1
    assert xs[0] > 0.0
    assert ys[0] == pytest.approx(1.0, abs=1e-8)
    assert ys[-1] == pytest.approx(0.0, abs=1e-8)


def test_draw_outcome_degenerate_probabilities():
    rng = np.random.default_rng(0)
    certain_zero = S4  # probability exactly 0 at the origin
    assert all(draw_outcome(certain_zero, DosePair(0, 0), rng) == 0
               for _ in range(200))
    certain_one = SixParameterTruth(1e300, 1.0, 1.0, 1.0, 1.0, 1.0)
    assert all(draw_outcome(certain_one, DosePair(1, 1), rng) == 1
               for _ in range(200))


def test_draw_outcome_law_of_large_numbers():
    truth = ReparamLinkTruth(ModelParams(0.33, 0.34, 0.34, 0.0,
                                         interaction_enabled=False))
    rng = np.random.default_rng(99)
    n = 1_000_000
    hits = sum(draw_outcome(truth, DosePair(0, 0), rng) for _ in range(n))
    assert hits / n == pytest.approx(0.33, abs=0.002)
