"""Operating characteristics across trial replicates.

Safety is summarized by the pooled DLT percentage and the share of trials
whose DLT rate exceeds theta+0.05 and theta+0.1.  Curve quality is
summarized pointwise along the true MTD curve: the signed minimum distance
to each replicate's estimated curve (positive when the estimate sits above
the truth), its average over replicates (bias), and the share of replicates
whose curve passes within a tolerance radius proportional to the point's
distance from the minimum combination (percent selection).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .design import MtdCurveEstimate, TrialStatus
from .errors import DomainError
from .model import DosePair, TrialData, mtd_curve_y


@dataclass(frozen=True)
class ReplicateResult:
    transcript: TrialData
    estimate: MtdCurveEstimate
    status: TrialStatus
    last_cohort_doses: tuple[DosePair, DosePair]
    dlt_count: int

    def __post_init__(self):
        if self.dlt_count != self.transcript.dlt_count():
            raise DomainError("dlt_count does not match the transcript")


@dataclass(frozen=True)
class SafetySummary:
    avg_pct_dlt: float
    pct_trials_over_theta_plus_005: float
    pct_trials_over_theta_plus_010: float


@dataclass(frozen=True)
class PointwiseCurveStats:
    grid_x: np.ndarray
    grid_y: np.ndarray
    bias: np.ndarray
    percent_selection: np.ndarray
    tolerance_p: float

    def __post_init__(self):
        n = len(self.grid_x)
        if not (len(self.grid_y) == len(self.bias)
                == len(self.percent_selection) == n):
            raise DomainError("pointwise stats arrays must share one length")


def safety_summary(results: Sequence[ReplicateResult],
                   theta: float) -> SafetySummary:
    if not results:
        raise DomainError("no replicate results")
    total_patients = sum(len(r.transcript) for r in results)
    total_dlt = sum(r.dlt_count for r in results)
    rates = np.array([r.dlt_count / len(r.transcript) for r in results])
    return SafetySummary(
        avg_pct_dlt=100.0 * total_dlt / total_patients,
        pct_trials_over_theta_plus_005=100.0 * float(np.mean(rates > theta + 0.05)),
        pct_trials_over_theta_plus_010=100.0 * float(np.mean(rates > theta + 0.10)))


def _estimate_curve_xy(estimate: MtdCurveEstimate,
                       discretization: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(0.0, 1.0, discretization)
    return xs, mtd_curve_y(estimate.as_params(), estimate.theta, xs)


def signed_min_distance(true_point: DosePair, estimate: MtdCurveEstimate,
                        curve_discretization: int = 501) -> float:
    """Signed distance from a true-curve point to the estimated curve.

    The magnitude is the minimum Euclidean distance to the estimated curve
    discretized over x in [0, 1] without clipping; the sign is that of
    y'(x) - y where y' is the estimated curve evaluated at the same x.
    """
    xs, ys = _estimate_curve_xy(estimate, curve_discretization)
    d = float(np.min(np.hypot(true_point.x - xs, true_point.y - ys)))
    y_prime = mtd_curve_y(estimate.as_params(), estimate.theta, true_point.x)
    return float(np.sign(y_prime - true_point.y)) * d


def _distance_matrix(results: Sequence[ReplicateResult], grid_x: np.ndarray,
                     grid_y: np.ndarray, curve_discretization: int) -> np.ndarray:
    """Signed distances, one row per replicate, one column per grid point."""
    out = np.empty((len(results), len(grid_x)))
    for j, rep in enumerate(results):
        xs, ys = _estimate_curve_xy(rep.estimate, curve_discretization)
        dist = np.min(np.hypot(grid_x[:, None] - xs[None, :],
                               grid_y[:, None] - ys[None, :]), axis=1)
        y_prime = mtd_curve_y(rep.estimate.as_params(), rep.estimate.theta,
                              grid_x)
        out[j] = np.sign(y_prime - grid_y) * dist
    return out


def pointwise_bias(results: Sequence[ReplicateResult], grid_x: np.ndarray,
                   grid_y: np.ndarray,
                   curve_discretization: int = 501) -> np.ndarray:
    """Average signed distance at each true-curve grid point."""
    if not results:
        raise DomainError("no replicate results")
    return _distance_matrix(results, grid_x, grid_y,
                            curve_discretization).mean(axis=0)


def pointwise_percent_selection(results: Sequence[ReplicateResult],
                                grid_x: np.ndarray, grid_y: np.ndarray,
                                p: float,
                                curve_discretization: int = 501) -> np.ndarray:
    """Share of replicates passing within p * ||(x, y)|| of each grid point."""
    if not results:
        raise DomainError("no replicate results")
    if not (0.0 < p < 1.0):
        raise DomainError("tolerance probability must lie in (0, 1)")
    dist = _distance_matrix(results, grid_x, grid_y, curve_discretization)
    radius = p * np.hypot(grid_x, grid_y)
    return 100.0 * np.mean(np.abs(dist) <= radius[None, :], axis=0)


def curve_stats(results: Sequence[ReplicateResult], grid_x: np.ndarray,
                grid_y: np.ndarray, p: float,
                curve_discretization: int = 501) -> PointwiseCurveStats:
    """Bias and percent selection in one pass over the distance matrix."""
    if not results:
        raise DomainError("no replicate results")
    dist = _distance_matrix(results, grid_x, grid_y, curve_discretization)
    radius = p * np.hypot(grid_x, grid_y)
    return PointwiseCurveStats(
        grid_x=np.asarray(grid_x, dtype=float),
        grid_y=np.asarray(grid_y, dtype=float),
        bias=dist.mean(axis=0),
        percent_selection=100.0 * np.mean(np.abs(dist) <= radius[None, :], axis=0),
        tolerance_p=p)


def aggregated_curve(results: Sequence[ReplicateResult]) -> MtdCurveEstimate:
    """Curve built from the across-replicate means of the posterior medians."""
    if not results:
        raise DomainError("no replicate results")
    first = results[0].estimate
    vals = np.array([[r.estimate.rho00_hat, r.estimate.rho01_hat,
                      r.estimate.rho10_hat, r.estimate.beta3_hat]
                     for r in results])
    rho00, rho01, rho10, beta3 = (float(v) for v in vals.mean(axis=0))
    rmin = min(rho01, rho10)
    if rho00 >= rmin:  # cannot happen for means of valid estimates
        rho00 = 0.999 * rmin
    return MtdCurveEstimate(rho00, rho01, rho10, beta3, first.link,
                            first.theta, interaction=first.interaction)


def last_dose_cloud(results: Iterable[ReplicateResult]) -> np.ndarray:
    """Final-cohort dose pairs of every replicate, flattened to (2m, 2)."""
    pts = []
    for rep in results:
        for dose in rep.last_cohort_doses:
            pts.append((dose.x, dose.y))
    if not pts:
        raise DomainError("no replicate results")
    return np.array(pts)
