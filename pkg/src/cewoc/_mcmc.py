"""Compiled inner loops for posterior sampling.

Scalar twins of the link functions plus the adaptive random-walk
Metropolis-within-Gibbs chain live here so the whole per-cohort refresh runs
inside one jitted call.  The chain walks unconstrained transforms

    t1 = logit(rho01), t2 = logit(rho10),
    t3 = logit(rho00 / min(rho01, rho10)), t4 = log(beta3)

which keep every visited state inside the constraint region by construction.
All randomness is consumed from pre-generated arrays, one normal and one
uniform per block per iteration, so acceptance patterns never perturb the
stream.
"""

import math

import numpy as np
from numba import njit

LOGISTIC = 0
PROBIT = 1
CLOGLOG = 2

_CLAMP = 1e-12
_SIG_CLAMP = 1e-15


@njit(cache=True)
def _sigmoid(t):
    if t >= 0.0:
        v = 1.0 / (1.0 + math.exp(-t))
    else:
        e = math.exp(t)
        v = e / (1.0 + e)
    if v < _SIG_CLAMP:
        v = _SIG_CLAMP
    elif v > 1.0 - _SIG_CLAMP:
        v = 1.0 - _SIG_CLAMP
    return v


@njit(cache=True)
def _norm_inv_lower(p):
    # Acklam rational approximation + one Halley step for p in (0, 0.5]
    # (matches links._norm_inv_lower)
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q
                 - 2.400758277161838e+00) * q - 2.549732539343734e+00) * q
               + 4.374664141464968e+00) * q + 2.938163982698783e+00)
             / ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q
                  + 2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((-3.969683028665376e+01 * r + 2.209460984245205e+02) * r
                 - 2.759285104469687e+02) * r + 1.383577518672690e+02) * r
               - 3.066479806614716e+01) * r + 2.506628277459239e+00) * q
             / (((((-5.447609879822406e+01 * r + 1.615858368580409e+02) * r
                   - 1.556989798598866e+02) * r + 6.680131188771972e+01) * r
                 - 1.328068155288572e+01) * r + 1.0))
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@njit(cache=True)
def _norm_inv(p):
    if p <= 0.5:
        return _norm_inv_lower(p)
    return -_norm_inv_lower(1.0 - p)


@njit(cache=True)
def link_cdf_scalar(link, u):
    if link == LOGISTIC:
        if u >= 0.0:
            return 1.0 / (1.0 + math.exp(-u))
        e = math.exp(u)
        return e / (1.0 + e)
    if link == PROBIT:
        return 0.5 * math.erfc(-u / math.sqrt(2.0))
    return -math.expm1(-math.exp(u))


@njit(cache=True)
def link_inv_scalar(link, p):
    if p < _CLAMP:
        p = _CLAMP
    elif p > 1.0 - _CLAMP:
        p = 1.0 - _CLAMP
    if link == LOGISTIC:
        return math.log(p / (1.0 - p))
    if link == PROBIT:
        return _norm_inv(p)
    return math.log(-math.log1p(-p))


@njit(cache=True)
def loglik(link, rho00, rho01, rho10, beta3, xs, ys, ts):
    f00 = link_inv_scalar(link, rho00)
    b1 = link_inv_scalar(link, rho10) - f00
    b2 = link_inv_scalar(link, rho01) - f00
    total = 0.0
    for i in range(xs.shape[0]):
        eta = f00 + b1 * xs[i] + b2 * ys[i] + beta3 * xs[i] * ys[i]
        g = link_cdf_scalar(link, eta)
        if g < _CLAMP:
            g = _CLAMP
        elif g > 1.0 - _CLAMP:
            g = 1.0 - _CLAMP
        if ts[i] == 1:
            total += math.log(g)
        else:
            total += math.log1p(-g)
    return total


@njit(cache=True)
def _logpost_transformed(link, interaction, gshape, grate, t1, t2, t3, t4,
                         xs, ys, ts):
    rho01 = _sigmoid(t1)
    rho10 = _sigmoid(t2)
    ratio = _sigmoid(t3)
    rmin = rho01 if rho01 < rho10 else rho10
    rho00 = ratio * rmin
    if rho00 < _SIG_CLAMP:
        rho00 = _SIG_CLAMP
    # log-Jacobians of the three logit transforms (uniform priors otherwise)
    lp = (math.log(rho01) + math.log1p(-rho01)
          + math.log(rho10) + math.log1p(-rho10)
          + math.log(ratio) + math.log1p(-ratio))
    if interaction:
        beta3 = math.exp(t4)
        # gamma prior density x exp-transform Jacobian, constants dropped
        lp += gshape * t4 - grate * beta3
    else:
        beta3 = 0.0
    lp += loglik(link, rho00, rho01, rho10, beta3, xs, ys, ts)
    return lp


@njit(cache=True)
def run_chain(xs, ys, ts, link, interaction, gshape, grate,
              n_iter, n_burn, thin, adapt_interval, target_accept,
              normals, unifs):
    """Adaptive RWM-within-Gibbs chain; returns (draws, acceptance rates).

    draws holds retained states as rows (rho00, rho01, rho10, beta3);
    acceptance rates are per block over post-burn-in iterations.
    """
    n_blocks = 4 if interaction else 3
    t = np.zeros(4)
    steps = np.ones(4)
    cur_lp = _logpost_transformed(link, interaction, gshape, grate,
                                  t[0], t[1], t[2], t[3], xs, ys, ts)

    n_kept = (n_iter - n_burn + thin - 1) // thin
    draws = np.empty((n_kept, 4))
    accept_post = np.zeros(4)
    batch_accept = np.zeros(4)
    in_batch = 0
    n_batches = 0

    for it in range(n_iter):
        for b in range(n_blocks):
            old = t[b]
            t[b] = old + steps[b] * normals[it, b]
            lp = _logpost_transformed(link, interaction, gshape, grate,
                                      t[0], t[1], t[2], t[3], xs, ys, ts)
            if math.log(unifs[it, b] + 5e-324) < lp - cur_lp:
                cur_lp = lp
                batch_accept[b] += 1.0
                if it >= n_burn:
                    accept_post[b] += 1.0
            else:
                t[b] = old
        if it < n_burn:
            in_batch += 1
            if in_batch == adapt_interval:
                n_batches += 1
                delta = 1.0 / math.sqrt(n_batches)
                if delta > 0.5:
                    delta = 0.5
                for b in range(n_blocks):
                    rate = batch_accept[b] / adapt_interval
                    steps[b] *= math.exp(delta * (rate - target_accept))
                    batch_accept[b] = 0.0
                in_batch = 0
        else:
            j = it - n_burn
            if j % thin == 0:
                rho01 = _sigmoid(t[0])
                rho10 = _sigmoid(t[1])
                ratio = _sigmoid(t[2])
                rmin = rho01 if rho01 < rho10 else rho10
                row = j // thin
                draws[row, 0] = ratio * rmin
                draws[row, 1] = rho01
                draws[row, 2] = rho10
                draws[row, 3] = math.exp(t[3]) if interaction else 0.0
    n_post = n_iter - n_burn
    acc = np.full(4, np.nan)
    for b in range(n_blocks):
        acc[b] = accept_post[b] / n_post
    return draws, acc
