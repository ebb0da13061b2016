"""Link functions mapping the linear predictor to a DLT probability.

Three cumulative-distribution links are supported: logistic, probit and
complementary log-log.  Both directions (``link_cdf`` and ``link_inv``)
accept scalars or numpy arrays and are the single source of truth for the
probability clamp applied before inversion: probabilities outside
``[1e-12, 1 - 1e-12]`` are clamped so that extreme posterior proposals
never produce infinite linear predictors.
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy import special

from .errors import DomainError

PROB_CLAMP = 1e-12


class LinkKind(enum.Enum):
    LOGISTIC = "logistic"
    PROBIT = "probit"
    CLOGLOG = "cloglog"

    @classmethod
    def parse(cls, name: str) -> "LinkKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise DomainError(f"unknown link {name!r}; expected one of "
                              f"{[k.value for k in cls]}") from None


# Acklam's rational approximation to the standard-normal quantile,
# refined below with one Halley step to full double precision.
_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02,
             -2.759285104469687e+02, 1.383577518672690e+02,
             -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02,
             -1.556989798598866e+02, 6.680131188771972e+01,
             -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01,
             -2.400758277161838e+00, -2.549732539343734e+00,
             4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01,
             2.445134137142996e+00, 3.754408661907416e+00)
_ACKLAM_SPLIT = 0.02425


def _norm_inv_lower(p):
    """Acklam + one Halley step on the lower half p in (0, 0.5].

    The refinement subtracts the exact CDF from p, which only carries its
    full meaning where p is small; the upper half is served by symmetry.
    """
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D

    q_low = np.sqrt(-2.0 * np.log(np.where(p < _ACKLAM_SPLIT, p, 0.5)))
    x_low = ((((((c[0] * q_low + c[1]) * q_low + c[2]) * q_low + c[3])
               * q_low + c[4]) * q_low + c[5])
             / ((((d[0] * q_low + d[1]) * q_low + d[2]) * q_low + d[3])
                * q_low + 1.0))

    q_mid = p - 0.5
    r2 = q_mid * q_mid
    x_mid = ((((((a[0] * r2 + a[1]) * r2 + a[2]) * r2 + a[3]) * r2 + a[4])
              * r2 + a[5]) * q_mid
             / (((((b[0] * r2 + b[1]) * r2 + b[2]) * r2 + b[3]) * r2 + b[4])
                * r2 + 1.0))

    x = np.where(p < _ACKLAM_SPLIT, x_low, x_mid)
    err = 0.5 * special.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def _norm_inv(p):
    """Standard-normal quantile via Acklam's polynomial plus one Halley step."""
    p = np.asarray(p, dtype=float)
    # 1 - p is exact for p >= 0.5, so the reflection costs no precision
    return np.where(p <= 0.5, _norm_inv_lower(np.minimum(p, 0.5)),
                    -_norm_inv_lower(np.minimum(1.0 - p, 0.5)))


def _check_finite(value, what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be finite")
    return arr


def link_cdf(kind: LinkKind, u):
    """Evaluate the link CDF F(u).

    Returns a probability strictly inside (0, 1); scalar in, scalar out.
    """
    arr = _check_finite(u, "linear predictor")
    if kind is LinkKind.LOGISTIC:
        out = special.expit(arr)
    elif kind is LinkKind.PROBIT:
        out = special.ndtr(arr)
    elif kind is LinkKind.CLOGLOG:
        out = -np.expm1(-np.exp(arr))
    else:  # pragma: no cover
        raise DomainError(f"unknown link kind {kind!r}")
    out = np.clip(out, 1e-300, 1.0 - 1e-16)
    return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out


def link_inv(kind: LinkKind, p):
    """Evaluate the inverse link F^{-1}(p) for p in (0, 1).

    Probabilities closer than ``PROB_CLAMP`` to either boundary are clamped
    before inversion.
    """
    arr = _check_finite(p, "probability")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("probability must lie strictly inside (0, 1)")
    arr = np.clip(arr, PROB_CLAMP, 1.0 - PROB_CLAMP)
    if kind is LinkKind.LOGISTIC:
        out = np.log(arr / (1.0 - arr))
    elif kind is LinkKind.PROBIT:
        out = _norm_inv(arr)
    elif kind is LinkKind.CLOGLOG:
        out = np.log(-np.log1p(-arr))
    else:  # pragma: no cover
        raise DomainError(f"unknown link kind {kind!r}")
    return float(out) if np.isscalar(p) or np.ndim(p) == 0 else out
