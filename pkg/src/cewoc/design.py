"""Cohort-of-two conditional-EWOC trial algorithm.

Each cohort after the first treats one patient on a fresh dose of drug A at
the partner's inherited drug-B level and one patient on a fresh dose of
drug B at an inherited drug-A level; the parity of the cohort index decides
which patient lineage updates which axis.  Fresh coordinates are the
alpha-quantile of the clipped conditional-MTD posterior (the EWOC rule),
then capped so no axis escalates by more than a fixed fraction of the dose
range relative to the lineage predecessor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, StateError
from .links import LinkKind
from .model import DosePair, ModelParams, TrialData
from .posterior import (ConditionalAxis, OUTCOME_STREAM_TAG, PosteriorDraws,
                        PriorSpec, SamplerConfig, fit_seed, gamma_per_draw,
                        posterior_quantile_gamma, sample_posterior)
from .truths import TruthModel, draw_outcome


@dataclass(frozen=True)
class DesignConfig:
    theta: float
    n_max: int
    alpha_start: float = 0.25
    alpha_increment: float = 0.05
    alpha_cap: float = 0.5
    escalation_step_cap: float = 0.20
    stop_n1: int = 10
    stop_xi1: float = 0.05
    stop_xi2: float = 0.80

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ConfigError("theta must lie in (0, 1)")
        if self.n_max <= 0 or self.n_max % 2 != 0:
            raise ConfigError("n_max must be a positive even integer")
        if not (0.0 < self.alpha_start <= self.alpha_cap <= 0.5):
            raise ConfigError("require 0 < alpha_start <= alpha_cap <= 0.5")
        if self.alpha_increment < 0.0:
            raise ConfigError("alpha increment must be nonnegative")
        if not (0.0 < self.escalation_step_cap <= 1.0):
            raise ConfigError("escalation step cap must lie in (0, 1]")
        if not (0 < self.stop_n1 <= self.n_max):
            raise ConfigError("stop_n1 must lie in 1..n_max")
        if self.stop_xi1 < 0.0 or not (0.0 < self.stop_xi2 < 1.0):
            raise ConfigError("invalid stopping-rule thresholds")


class TrialStatus(enum.Enum):
    ENROLLING = "enrolling"
    STOPPED_FOR_SAFETY = "stopped_for_safety"
    COMPLETED = "completed"


@dataclass(frozen=True)
class AllocationAudit:
    """Per-allocation EWOC bookkeeping (kept for audits and diagnostics)."""

    patient_index: int
    cohort: int
    axis: ConditionalAxis
    alpha: float
    quantile: float
    assigned: float
    n_draws: int
    frac_draws_below: float


@dataclass
class TrialState:
    data: TrialData
    next_cohort_index: int
    current_alpha: float
    status: TrialStatus
    pending_doses: tuple[DosePair, DosePair] | None
    audit: list[AllocationAudit] = field(default_factory=list)


@dataclass(frozen=True)
class MtdCurveEstimate:
    """End-of-trial curve estimate: marginal posterior medians."""

    rho00_hat: float
    rho01_hat: float
    rho10_hat: float
    beta3_hat: float
    link: LinkKind
    theta: float
    interaction: bool = True

    def as_params(self) -> ModelParams:
        return ModelParams(self.rho00_hat, self.rho01_hat, self.rho10_hat,
                           self.beta3_hat, self.link,
                           interaction_enabled=self.interaction)


def schedule_alpha(config: DesignConfig, cohort_index: int) -> float:
    """Feasibility bound used when dosing the given cohort."""
    if cohort_index <= 2:
        return config.alpha_start
    return min(config.alpha_cap,
               config.alpha_start + config.alpha_increment * (cohort_index - 2))


def first_cohort(config: DesignConfig) -> tuple[DosePair, DosePair]:
    """Both patients of cohort 1 receive the minimum combination."""
    return (DosePair(0.0, 0.0), DosePair(0.0, 0.0))


def new_trial(config: DesignConfig) -> TrialState:
    return TrialState(data=TrialData(target_theta=config.theta),
                      next_cohort_index=2,
                      current_alpha=config.alpha_start,
                      status=TrialStatus.ENROLLING,
                      pending_doses=first_cohort(config))


def record_cohort_outcomes(state: TrialState, t1: int, t2: int) -> None:
    if state.status is not TrialStatus.ENROLLING:
        raise StateError(f"trial is {state.status.value}; outcomes not accepted")
    if state.pending_doses is None:
        raise StateError("no cohort is awaiting outcomes")
    d1, d2 = state.pending_doses
    state.data.add(d1, t1)
    state.data.add(d2, t2)
    state.pending_doses = None


def _cap_step(new_value: float, previous: float, cap: float) -> float:
    capped = min(new_value, previous + cap)
    return min(max(capped, 0.0), 1.0)


def next_cohort_doses(state: TrialState, draws: PosteriorDraws,
                      config: DesignConfig) -> tuple[DosePair, DosePair]:
    """Dose the next cohort from the current posterior (EWOC quantiles).

    Patient 2i-1 inherits one coordinate from patient 2i-3 and patient 2i
    from patient 2i-2; the cohort parity decides which axis each of them
    refreshes.  Fresh coordinates are capped against the same axis of the
    lineage predecessor.
    """
    if state.status is not TrialStatus.ENROLLING:
        raise StateError(f"trial is {state.status.value}; cannot dose")
    if state.pending_doses is not None:
        raise StateError("previous cohort outcomes are unresolved")
    i = state.next_cohort_index
    if len(state.data) != 2 * (i - 1):
        raise StateError("trial data does not match the cohort index")
    theta = config.theta
    alpha = schedule_alpha(config, i)
    rec_a = state.data.records[-2]  # patient 2i-3
    rec_b = state.data.records[-1]  # patient 2i-2

    def allocate(axis: ConditionalAxis, conditioning: float, previous: float,
                 patient_index: int) -> float:
        q = posterior_quantile_gamma(draws, theta, axis, conditioning, alpha)
        assigned = _cap_step(q, previous, config.escalation_step_cap)
        gam = gamma_per_draw(draws, theta, axis, conditioning)
        state.audit.append(AllocationAudit(
            patient_index=patient_index, cohort=i, axis=axis, alpha=alpha,
            quantile=q, assigned=assigned, n_draws=len(draws),
            frac_draws_below=float(np.mean(gam < assigned))))
        return assigned

    if i % 2 == 0:
        # patient 2i-1: fresh drug A at B = y_{2i-3}; patient 2i: fresh
        # drug B at A = x_{2i-2}
        x_new = allocate(ConditionalAxis.A_GIVEN_B, rec_a.dose.y,
                         rec_a.dose.x, 2 * i - 1)
        y_new = allocate(ConditionalAxis.B_GIVEN_A, rec_b.dose.x,
                         rec_b.dose.y, 2 * i)
        doses = (DosePair(x_new, rec_a.dose.y), DosePair(rec_b.dose.x, y_new))
    else:
        # mirrored roles: patient 2i-1 refreshes drug B, patient 2i drug A
        y_new = allocate(ConditionalAxis.B_GIVEN_A, rec_a.dose.x,
                         rec_a.dose.y, 2 * i - 1)
        x_new = allocate(ConditionalAxis.A_GIVEN_B, rec_b.dose.y,
                         rec_b.dose.x, 2 * i)
        doses = (DosePair(rec_a.dose.x, y_new), DosePair(x_new, rec_b.dose.y))

    state.pending_doses = doses
    state.current_alpha = alpha
    state.next_cohort_index = i + 1
    return doses


def check_stopping(data: TrialData, draws: PosteriorDraws,
                   config: DesignConfig) -> bool:
    """True when the minimum combination looks too toxic to continue."""
    if len(data) < config.stop_n1:
        raise StateError(f"stopping rule needs at least {config.stop_n1} "
                         f"evaluable patients")
    frac = float(np.mean(draws.rho00 > config.theta + config.stop_xi1))
    return frac > config.stop_xi2


def estimate_mtd_curve(draws: PosteriorDraws, theta: float) -> MtdCurveEstimate:
    """Curve estimate from marginal posterior medians of the parameters."""
    if len(draws) == 0:
        raise StateError("posterior draws are empty")
    med = np.median(draws.values, axis=0)
    rho00, rho01, rho10, beta3 = (float(v) for v in med)
    rmin = min(rho01, rho10)
    if rho00 >= rmin:  # possible only on degenerate draw sets
        rho00 = 0.999 * rmin
    return MtdCurveEstimate(rho00, rho01, rho10, beta3, draws.link, theta,
                            interaction=draws.interaction)


@dataclass(frozen=True)
class TrialRunResult:
    data: TrialData
    estimate: MtdCurveEstimate
    status: TrialStatus
    last_cohort_doses: tuple[DosePair, DosePair]
    audit: tuple[AllocationAudit, ...]
    final_acceptance_rates: tuple[float, ...]


def run_trial(truth: TruthModel, config: DesignConfig, prior: PriorSpec,
              sampler: SamplerConfig, working_link: LinkKind,
              interaction: bool, seed) -> TrialRunResult:
    """Simulate one complete trial against a truth model.

    Outcomes are Bernoulli draws from the truth at the assigned dose; the
    posterior refreshes after every cohort; the stopping rule applies once
    ``stop_n1`` patients are evaluable.  Deterministic given ``seed``.
    """
    base = seed if isinstance(seed, (tuple, list)) else (seed,)
    base = tuple(int(v) for v in base)
    outcome_rng = np.random.default_rng(
        np.random.SeedSequence((*base, OUTCOME_STREAM_TAG)))

    state = new_trial(config)
    estimate = None
    while True:
        d1, d2 = state.pending_doses
        record_cohort_outcomes(state,
                               draw_outcome(truth, d1, outcome_rng),
                               draw_outcome(truth, d2, outcome_rng))
        k = len(state.data)
        draws = sample_posterior(state.data, prior, sampler, working_link,
                                 interaction, seed=fit_seed(base, k))
        if k >= config.n_max:
            state.status = TrialStatus.COMPLETED
            estimate = estimate_mtd_curve(draws, config.theta)
            break
        if k >= config.stop_n1 and check_stopping(state.data, draws, config):
            state.status = TrialStatus.STOPPED_FOR_SAFETY
            estimate = estimate_mtd_curve(draws, config.theta)
            break
        next_cohort_doses(state, draws, config)

    records = state.data.records
    last = (records[-2].dose, records[-1].dose)
    return TrialRunResult(data=state.data, estimate=estimate,
                          status=state.status, last_cohort_doses=last,
                          audit=tuple(state.audit),
                          final_acceptance_rates=draws.acceptance_rates)
