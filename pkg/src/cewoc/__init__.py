"""Conditional-EWOC dose finding for two-drug combinations.

Continuous standardized doses, a reparameterized link-model posterior over
corner DLT probabilities plus a toxic-synergy coefficient, cohort-of-two
EWOC allocation with a variable feasibility bound, replicated-trial
operating characteristics, and a live trial-conduct service.
"""

from .design import (AllocationAudit, DesignConfig, MtdCurveEstimate,
                     TrialRunResult, TrialState, TrialStatus, check_stopping,
                     estimate_mtd_curve, first_cohort, new_trial,
                     next_cohort_doses, record_cohort_outcomes, run_trial,
                     schedule_alpha)
from .errors import CewocError, ConfigError, DomainError, StateError
from .harness import (ComparisonTable, ExperimentConfig, OpCharReport,
                      compare_experiments, load_report, replicate_seed,
                      run_experiment)
from .links import LinkKind, link_cdf, link_inv
from .metrics import (PointwiseCurveStats, ReplicateResult, SafetySummary,
                      aggregated_curve, curve_stats, last_dose_cloud,
                      pointwise_bias, pointwise_percent_selection,
                      safety_summary, signed_min_distance)
from .model import (DosePair, DoseWindow, ModelParams, PatientRecord,
                    TrialData, destandardize, gamma_a_given_b,
                    gamma_b_given_a, mtd_curve_y, prob_dlt, prob_dlt_xy,
                    standardize)
from .posterior import (ConditionalAxis, PosteriorDraws, PriorSpec,
                        SamplerConfig, fit_seed, log_posterior,
                        posterior_quantile_gamma, quadrature_oracle,
                        sample_posterior)
from .truths import (ReparamLinkTruth, SixParameterTruth, TruthModel,
                     draw_outcome, scenario, shifted_link_truth,
                     true_curve_grid, true_mtd_curve_points, truth_prob_dlt,
                     truth_prob_dlt_xy)

__version__ = "0.1.0"
