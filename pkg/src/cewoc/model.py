"""Dose-toxicity model for two-drug combinations on standardized doses.

The working model ties the DLT probability at a standardized combination
(x, y) in the unit square to four clinician-interpretable parameters:
rho00, rho01, rho10 are the DLT probabilities at the corner combinations
(0,0), (0,1), (1,0) and beta3 >= 0 measures toxic synergy between the
agents.  With F the chosen link,

    P(DLT | x, y) = F(F^-1(rho00) + (F^-1(rho10) - F^-1(rho00)) x
                      + (F^-1(rho01) - F^-1(rho00)) y + beta3 x y)

and the MTD at target rate theta is the level set of that surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .links import LinkKind, link_cdf, link_inv


@dataclass(frozen=True)
class DoseWindow:
    """Raw dose intervals for the two agents (e.g. mg/m^2)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("dose window bounds must be strictly ordered")


@dataclass(frozen=True)
class DosePair:
    """Standardized dose combination, both coordinates in [0, 1]."""

    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise DomainError(f"standardized doses must lie in [0,1], got "
                              f"({self.x}, {self.y})")


@dataclass(frozen=True)
class ModelParams:
    """Reparameterized model: corner DLT probabilities plus interaction."""

    rho00: float
    rho01: float
    rho10: float
    beta3: float
    link: LinkKind = LinkKind.LOGISTIC
    interaction_enabled: bool = True

    def __post_init__(self):
        if not (0.0 < self.rho00 < min(self.rho01, self.rho10) < 1.0):
            raise DomainError("require 0 < rho00 < min(rho01, rho10) < 1")
        if self.beta3 < 0.0:
            raise DomainError("interaction coefficient must be nonnegative")
        if not self.interaction_enabled and self.beta3 != 0.0:
            raise DomainError("beta3 must be 0 when interaction is disabled")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.rho00, self.rho01, self.rho10, self.beta3)


@dataclass(frozen=True)
class PatientRecord:
    index: int
    dose: DosePair
    dlt: int
    cohort: int

    def __post_init__(self):
        if self.index < 1:
            raise DomainError("patient index must be positive")
        if self.dlt not in (0, 1):
            raise DomainError("DLT indicator must be 0 or 1")
        if self.cohort != math.ceil(self.index / 2):
            raise DomainError(f"patient {self.index} must sit in cohort "
                              f"{math.ceil(self.index / 2)}, got {self.cohort}")


@dataclass
class TrialData:
    """Ordered accrual records plus the target DLT rate."""

    target_theta: float
    records: list[PatientRecord] = field(default_factory=list)

    def __post_init__(self):
        if not (0.0 < self.target_theta < 1.0):
            raise DomainError("target theta must lie in (0, 1)")
        for i, rec in enumerate(self.records, start=1):
            if rec.index != i:
                raise DomainError("record indices must run 1..k without gaps")

    def __len__(self) -> int:
        return len(self.records)

    def add(self, dose: DosePair, dlt: int) -> PatientRecord:
        idx = len(self.records) + 1
        rec = PatientRecord(index=idx, dose=dose, dlt=int(dlt),
                            cohort=math.ceil(idx / 2))
        self.records.append(rec)
        return rec

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xs = np.array([r.dose.x for r in self.records], dtype=float)
        ys = np.array([r.dose.y for r in self.records], dtype=float)
        ts = np.array([r.dlt for r in self.records], dtype=np.int64)
        return xs, ys, ts

    def dlt_count(self) -> int:
        return sum(r.dlt for r in self.records)


def standardize(window: DoseWindow, raw_x: float, raw_y: float) -> DosePair:
    """Map raw doses inside the window onto the unit square."""
    if not (window.x_min <= raw_x <= window.x_max
            and window.y_min <= raw_y <= window.y_max):
        raise DomainError(f"raw dose ({raw_x}, {raw_y}) outside window")
    return DosePair((raw_x - window.x_min) / (window.x_max - window.x_min),
                    (raw_y - window.y_min) / (window.y_max - window.y_min))


def destandardize(window: DoseWindow, dose: DosePair) -> tuple[float, float]:
    """Inverse of :func:`standardize`."""
    return (window.x_min + dose.x * (window.x_max - window.x_min),
            window.y_min + dose.y * (window.y_max - window.y_min))


def _coefficients(params: ModelParams) -> tuple[float, float, float]:
    f00 = link_inv(params.link, params.rho00)
    b1 = link_inv(params.link, params.rho10) - f00
    b2 = link_inv(params.link, params.rho01) - f00
    return f00, b1, b2


def prob_dlt_xy(params: ModelParams, x, y):
    """DLT probability at standardized coordinates; accepts arrays."""
    f00, b1, b2 = _coefficients(params)
    eta = f00 + b1 * np.asarray(x, dtype=float) + b2 * np.asarray(y, dtype=float) \
        + params.beta3 * np.asarray(x, dtype=float) * np.asarray(y, dtype=float)
    return link_cdf(params.link, eta)


def prob_dlt(params: ModelParams, dose: DosePair) -> float:
    return float(prob_dlt_xy(params, dose.x, dose.y))


def mtd_curve_y(params: ModelParams, theta: float, x_star):
    """Solve the theta level set for y at given x; result is NOT clipped.

    Callers needing doses clip to [0,1]; the operating-characteristic
    metrics need the raw curve.
    """
    if not (0.0 < theta < 1.0):
        raise DomainError("theta must lie in (0, 1)")
    f00, b1, b2 = _coefficients(params)
    x = np.asarray(x_star, dtype=float)
    num = (link_inv(params.link, theta) - f00) - b1 * x
    den = b2 + params.beta3 * x
    out = num / den
    return float(out) if np.ndim(x_star) == 0 else out


def gamma_a_given_b(params: ModelParams, theta: float, y):
    """Conditional MTD of drug A when drug B is held at y; NOT clipped."""
    if not (0.0 < theta < 1.0):
        raise DomainError("theta must lie in (0, 1)")
    f00, b1, b2 = _coefficients(params)
    yv = np.asarray(y, dtype=float)
    num = (link_inv(params.link, theta) - f00) - b2 * yv
    den = b1 + params.beta3 * yv
    out = num / den
    return float(out) if np.ndim(y) == 0 else out


def gamma_b_given_a(params: ModelParams, theta: float, x):
    """Conditional MTD of drug B when drug A is held at x; NOT clipped.

    Identical to the theta level set solved for y, kept as its own entry
    point to mirror :func:`gamma_a_given_b`.
    """
    return mtd_curve_y(params, theta, x)


def transcript_rows(data: TrialData) -> list[dict]:
    """Plain-dict view of the accrual records for serialization."""
    return [{"index": r.index, "cohort": r.cohort, "x": r.dose.x,
             "y": r.dose.y, "t": r.dlt} for r in data.records]


def trial_data_from_rows(rows, target_theta: float) -> TrialData:
    data = TrialData(target_theta=target_theta)
    for row in rows:
        data.add(DosePair(float(row["x"]), float(row["y"])), int(row["t"]))
    return data
