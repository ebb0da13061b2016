"""True data-generating models for the simulation studies.

Two families: the reparameterized link model itself (with any of the three
links), and a six-parameter saturating model whose toxicity surface is

    P(T=1 | x, y) = 1 - (1 + a1 x^b1 + a2 y^b2 + a3 (x^b1 y^b2)^b3)^-1.

Shifted-intercept truths let a probit or cloglog surface share the exact
MTD curve of a logistic base model, which is how the misspecification
scenarios are constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .links import LinkKind, link_cdf, link_inv
from .model import DosePair, ModelParams, mtd_curve_y, prob_dlt_xy


@dataclass(frozen=True)
class ReparamLinkTruth:
    params: ModelParams


@dataclass(frozen=True)
class SixParameterTruth:
    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float

    def __post_init__(self):
        if min(self.a1, self.a2, self.a3, self.b1, self.b2, self.b3) <= 0.0:
            raise DomainError("six-parameter truth requires positive fields")


TruthModel = Union[ReparamLinkTruth, SixParameterTruth]


def truth_prob_dlt_xy(truth: TruthModel, x, y):
    """DLT probability of the truth at standardized coordinates (arrays ok)."""
    if isinstance(truth, ReparamLinkTruth):
        return prob_dlt_xy(truth.params, x, y)
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    denom = (1.0 + truth.a1 * xv ** truth.b1 + truth.a2 * yv ** truth.b2
             + truth.a3 * (xv ** truth.b1 * yv ** truth.b2) ** truth.b3)
    out = 1.0 - 1.0 / denom
    return float(out) if np.ndim(x) == 0 and np.ndim(y) == 0 else out


def truth_prob_dlt(truth: TruthModel, dose: DosePair) -> float:
    return float(truth_prob_dlt_xy(truth, dose.x, dose.y))


def shifted_link_truth(base: ModelParams, target_link: LinkKind,
                       theta: float) -> ModelParams:
    """Recast a logistic truth onto another link with the same MTD curve.

    Slope coefficients carry over unchanged; the intercept is chosen so the
    theta level set of the new surface coincides with the logistic one.
    """
    if base.link is not LinkKind.LOGISTIC:
        raise DomainError("intercept shift is defined for logistic bases")
    if target_link is LinkKind.LOGISTIC:
        return base
    b0 = link_inv(LinkKind.LOGISTIC, base.rho00)
    b1 = link_inv(LinkKind.LOGISTIC, base.rho10) - b0
    b2 = link_inv(LinkKind.LOGISTIC, base.rho01) - b0
    b0_shift = b0 - link_inv(LinkKind.LOGISTIC, theta) + link_inv(target_link, theta)
    return ModelParams(rho00=link_cdf(target_link, b0_shift),
                       rho01=link_cdf(target_link, b0_shift + b2),
                       rho10=link_cdf(target_link, b0_shift + b1),
                       beta3=base.beta3,
                       link=target_link,
                       interaction_enabled=base.interaction_enabled)


def bisect_root(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Root of a monotone function by plain bisection on a bracketing interval."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise DomainError("root is not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def _curve_y_at(truth: TruthModel, theta: float, x: float) -> float:
    """y solving P(DLT | x, y) = theta, or None when no solution in [0, 1]."""
    if isinstance(truth, ReparamLinkTruth):
        return mtd_curve_y(truth.params, theta, x)
    p0 = truth_prob_dlt_xy(truth, x, 0.0)
    p1 = truth_prob_dlt_xy(truth, x, 1.0)
    if p0 > theta:
        return -1.0  # below the square: even y=0 is too toxic
    if p1 < theta:
        return 2.0  # above the square: even y=1 is too safe
    return bisect_root(lambda y: truth_prob_dlt_xy(truth, x, y) - theta, 0.0, 1.0)


def true_mtd_curve_points(truth: TruthModel, theta: float,
                          grid_size: int) -> list[DosePair]:
    """Points of the true MTD curve inside the unit square on an x-grid."""
    if grid_size < 2:
        raise DomainError("grid size must be at least 2")
    points = []
    for x in np.linspace(0.0, 1.0, grid_size):
        y = _curve_y_at(truth, theta, float(x))
        if 0.0 <= y <= 1.0:
            points.append(DosePair(float(x), float(y)))
    return points


def true_curve_grid(truth: TruthModel, theta: float,
                    n_points: int = 201) -> tuple[np.ndarray, np.ndarray]:
    """Dense true-curve grid over the x-range where the curve stays in [0,1].

    This is the grid the pointwise operating characteristics are computed
    on; interval endpoints are located by bisection on the monotone edge
    profiles so no grid point falls outside the square.
    """
    def edge_top(x):
        return truth_prob_dlt_xy(truth, x, 1.0) - theta

    def edge_bottom(x):
        return truth_prob_dlt_xy(truth, x, 0.0) - theta

    if edge_bottom(0.0) >= 0.0:
        raise DomainError("minimum combination already exceeds theta; "
                          "the curve does not enter the unit square")
    x_lo = 0.0 if edge_top(0.0) >= 0.0 else (
        1.0 if edge_top(1.0) < 0.0 else bisect_root(edge_top, 0.0, 1.0))
    x_hi = 1.0 if edge_bottom(1.0) <= 0.0 else bisect_root(edge_bottom, 0.0, 1.0)
    if x_lo >= x_hi:
        raise DomainError("true curve does not cross the unit square")
    xs = np.linspace(x_lo, x_hi, n_points)
    ys = np.array([_curve_y_at(truth, theta, float(x)) for x in xs])
    return xs, np.clip(ys, 0.0, 1.0)


def draw_outcome(truth: TruthModel, dose: DosePair, rng: np.random.Generator) -> int:
    """Bernoulli DLT outcome at the assigned combination."""
    return int(rng.random() < truth_prob_dlt(truth, dose))


def scenario(name: str) -> TruthModel:
    """Named scenario presets with the published true parameter values."""
    presets = {
        "s1": ReparamLinkTruth(ModelParams(0.01, 0.6, 0.6, 40.0)),
        "s2": ReparamLinkTruth(ModelParams(0.01, 0.2, 0.9, 100.0)),
        "s3": ReparamLinkTruth(ModelParams(0.001, 0.6, 0.01, 10.0)),
        "s4": SixParameterTruth(0.5, 0.5, 2.0, 12.0, 5.0, 0.1),
    }
    try:
        return presets[name]
    except KeyError:
        raise DomainError(f"unknown scenario {name!r}; expected "
                          f"{sorted(presets)}") from None


def truth_to_dict(truth: TruthModel) -> dict:
    if isinstance(truth, ReparamLinkTruth):
        p = truth.params
        return {"kind": "reparam_link", "rho00": p.rho00, "rho01": p.rho01,
                "rho10": p.rho10, "beta3": p.beta3, "link": p.link.value,
                "interaction_enabled": p.interaction_enabled}
    return {"kind": "six_parameter", "a1": truth.a1, "a2": truth.a2,
            "a3": truth.a3, "b1": truth.b1, "b2": truth.b2, "b3": truth.b3}


def truth_from_dict(payload: dict) -> TruthModel:
    kind = payload.get("kind")
    if kind == "reparam_link":
        return ReparamLinkTruth(ModelParams(
            rho00=float(payload["rho00"]), rho01=float(payload["rho01"]),
            rho10=float(payload["rho10"]), beta3=float(payload["beta3"]),
            link=LinkKind.parse(payload.get("link", "logistic")),
            interaction_enabled=bool(payload.get("interaction_enabled", True))))
    if kind == "six_parameter":
        return SixParameterTruth(*(float(payload[k])
                                   for k in ("a1", "a2", "a3", "b1", "b2", "b3")))
    raise DomainError(f"unknown truth kind {kind!r}")
