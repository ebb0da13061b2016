"""Posterior over (rho00, rho01, rho10, beta3) and its MCMC / quadrature backends.

Priors: rho01 and rho10 are independent uniform(0,1); conditionally on them
the ratio rho00 / min(rho01, rho10) is uniform(0,1), which puts density
1 / min(rho01, rho10) on rho00 over the constraint region; beta3 carries a
gamma prior parameterized by mean and variance.  With the interaction
disabled the gamma component is dropped and beta3 is pinned at zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _mcmc
from .errors import ConfigError, DomainError, StateError
from .links import LinkKind, link_cdf, link_inv
from .model import ModelParams, TrialData, gamma_a_given_b, gamma_b_given_a

_LINK_IDS = {LinkKind.LOGISTIC: _mcmc.LOGISTIC,
             LinkKind.PROBIT: _mcmc.PROBIT,
             LinkKind.CLOGLOG: _mcmc.CLOGLOG}

# Stream tags mixed into seed material so outcome draws, per-refresh fits
# and ad-hoc fits never share a stream.
FIT_STREAM_TAG = 0x5EED_F17
OUTCOME_STREAM_TAG = 0x5EED_0DD


@dataclass(frozen=True)
class PriorSpec:
    """Hyperparameters; the rho-block priors are fixed uniforms."""

    gamma_mean: float = 21.0
    gamma_variance: float = 540.0

    def __post_init__(self):
        if self.gamma_mean <= 0.0 or self.gamma_variance <= 0.0:
            raise ConfigError("gamma prior mean and variance must be positive")

    @property
    def gamma_shape(self) -> float:
        return self.gamma_mean ** 2 / self.gamma_variance

    @property
    def gamma_rate(self) -> float:
        return self.gamma_mean / self.gamma_variance


@dataclass(frozen=True)
class SamplerConfig:
    n_iterations: int = 6000
    n_burnin: int = 2000
    thin: int = 2
    seed: int = 0
    adapt_interval: int = 50
    target_accept: float = 0.35

    def __post_init__(self):
        if self.n_iterations <= 0 or self.thin <= 0 or self.adapt_interval <= 0:
            raise ConfigError("iteration counts must be positive")
        if not (0 <= self.n_burnin < self.n_iterations):
            raise ConfigError("burn-in must be shorter than the chain")
        if not (0.0 < self.target_accept < 1.0):
            raise ConfigError("target acceptance must lie in (0, 1)")
        if self.n_retained < 500:
            raise ConfigError("configuration retains fewer than 500 draws")

    @property
    def n_retained(self) -> int:
        return (self.n_iterations - self.n_burnin + self.thin - 1) // self.thin

    def with_seed(self, seed: int) -> "SamplerConfig":
        return replace(self, seed=int(seed))


class ConditionalAxis(enum.Enum):
    A_GIVEN_B = "a_given_b"
    B_GIVEN_A = "b_given_a"


@dataclass(frozen=True)
class PosteriorDraws:
    """Retained MCMC states, one row per draw: (rho00, rho01, rho10, beta3)."""

    values: np.ndarray
    link: LinkKind
    interaction: bool
    acceptance_rates: tuple[float, ...]

    def __post_init__(self):
        vals = self.values
        if vals.ndim != 2 or vals.shape[1] != 4 or vals.shape[0] == 0:
            raise ConfigError("draws must be a nonempty (n, 4) array")
        rmin = np.minimum(vals[:, 1], vals[:, 2])
        if not (np.all(vals[:, 0] > 0) and np.all(vals[:, 0] < rmin)
                and np.all(rmin < 1) and np.all(vals[:, 3] >= 0)):
            raise ConfigError("draws violate the parameter constraints")
        if not self.interaction and np.any(vals[:, 3] != 0.0):
            raise ConfigError("interaction disabled but beta3 draws nonzero")
        vals.setflags(write=False)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def rho00(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def rho01(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def rho10(self) -> np.ndarray:
        return self.values[:, 2]

    @property
    def beta3(self) -> np.ndarray:
        return self.values[:, 3]


def _log_prior_rho(rho00: float, rho01: float, rho10: float) -> float:
    rmin = min(rho01, rho10)
    if not (0.0 < rho00 < rmin < 1.0 and rho01 < 1.0 and rho10 < 1.0
            and rho01 > 0.0 and rho10 > 0.0):
        return -math.inf
    return -math.log(rmin)


def log_posterior(params, data: TrialData, prior: PriorSpec,
                  link: LinkKind | None = None,
                  interaction: bool | None = None) -> float:
    """Log posterior density (unnormalized) in the original parameterization.

    ``params`` is either a ModelParams or a plain (rho00, rho01, rho10, beta3)
    sequence; raw sequences outside the constraint region return ``-inf``
    rather than raising, which is what the samplers and quadrature need.
    """
    if isinstance(params, ModelParams):
        rho00, rho01, rho10, beta3 = params.as_tuple()
        link = params.link
        interaction = params.interaction_enabled
    else:
        rho00, rho01, rho10, beta3 = (float(v) for v in params)
        if link is None or interaction is None:
            raise DomainError("raw parameter tuples require link and interaction")
    lp = _log_prior_rho(rho00, rho01, rho10)
    if lp == -math.inf:
        return lp
    if interaction:
        if beta3 < 0.0:
            return -math.inf
        shape, rate = prior.gamma_shape, prior.gamma_rate
        if beta3 == 0.0:
            # boundary of the gamma support (divergent for shape < 1,
            # zero for shape > 1); excluded as a measure-zero point
            return -math.inf
        lp += (shape * math.log(rate) - math.lgamma(shape)
               + (shape - 1.0) * math.log(beta3) - rate * beta3)
    elif beta3 != 0.0:
        return -math.inf
    xs, ys, ts = data.arrays()
    lp += _mcmc.loglik(_LINK_IDS[link], rho00, rho01, rho10, beta3, xs, ys, ts)
    return lp


def sample_posterior(data: TrialData, prior: PriorSpec, config: SamplerConfig,
                     link: LinkKind, interaction: bool,
                     seed=None) -> PosteriorDraws:
    """Run the adaptive RWM-within-Gibbs chain; deterministic given the seed.

    ``seed`` overrides ``config.seed`` when given and may be any numpy
    SeedSequence entropy (int or tuple of ints).
    """
    xs, ys, ts = data.arrays()
    entropy = config.seed if seed is None else seed
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    normals = rng.standard_normal((config.n_iterations, 4))
    unifs = rng.random((config.n_iterations, 4))
    vals, acc = _mcmc.run_chain(
        xs, ys, ts, _LINK_IDS[link], interaction,
        prior.gamma_shape, prior.gamma_rate,
        config.n_iterations, config.n_burnin, config.thin,
        config.adapt_interval, config.target_accept, normals, unifs)
    n_blocks = 4 if interaction else 3
    return PosteriorDraws(values=vals, link=link, interaction=interaction,
                          acceptance_rates=tuple(float(a) for a in acc[:n_blocks]))


def fit_seed(trial_seed, n_records: int):
    """Seed material for the posterior refresh after ``n_records`` outcomes.

    Shared by the simulator, the one-shot CLI and the trial service so that
    the same transcript and trial seed always reproduce the same draws.
    """
    base = trial_seed if isinstance(trial_seed, (tuple, list)) else (trial_seed,)
    return (*[int(v) for v in base], FIT_STREAM_TAG, int(n_records))


def _beta_grid(n: int, upper: float = 300.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    edges = np.concatenate(([0.0], np.geomspace(1e-6, upper, n)))
    mids = 0.5 * (edges[1:] + edges[:-1])
    widths = np.diff(edges)
    return edges, mids, widths


def _interp_median(edges: np.ndarray, cell_masses: np.ndarray) -> float:
    cdf = np.concatenate(([0.0], np.cumsum(cell_masses)))
    cdf /= cdf[-1]
    idx = int(np.searchsorted(cdf, 0.5, side="right") - 1)
    idx = min(max(idx, 0), len(cell_masses) - 1)
    span = cdf[idx + 1] - cdf[idx]
    frac = 0.5 if span == 0 else (0.5 - cdf[idx]) / span
    return float(edges[idx] + frac * (edges[idx + 1] - edges[idx]))


def quadrature_oracle(data: TrialData, prior: PriorSpec, link: LinkKind,
                      interaction: bool,
                      grid_sizes: tuple[int, int, int, int] = (60, 60, 60, 100),
                      ) -> tuple[float, float, float, float]:
    """Marginal posterior medians by dense midpoint-rule quadrature.

    Independent of the MCMC path: the posterior is normalized on a tensor
    grid over (rho00, rho01, rho10) with the constraint region masked, and
    log-spaced knots on [0, 300] for beta3.  Only small datasets (k <= 10)
    are tractable.
    """
    if len(data) > 10:
        raise DomainError("quadrature oracle is limited to k <= 10 records")
    if any(g < 20 for g in grid_sizes):
        raise ConfigError("quadrature grids need at least 20 knots per axis")
    n0, n1, n2, n3 = grid_sizes

    e0 = np.linspace(0.0, 1.0, n0 + 1)
    e1 = np.linspace(0.0, 1.0, n1 + 1)
    e2 = np.linspace(0.0, 1.0, n2 + 1)
    r00 = 0.5 * (e0[1:] + e0[:-1])
    r01 = 0.5 * (e1[1:] + e1[:-1])
    r10 = 0.5 * (e2[1:] + e2[:-1])

    xs, ys, ts = data.arrays()
    g01 = r01[None, :, None]
    g10 = r10[None, None, :]
    rmin = np.minimum(g01, g10)

    # rho-block prior mass per cell: density 1/min over the overlap of the
    # cell with {rho00 < min}.  Fractional overlap for the straddling cell
    # keeps the rule second-order; a hard mask would cost O(h) at the edge.
    h0 = 1.0 / n0
    overlap = np.clip((rmin - e0[:-1][:, None, None]) / h0, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        log_rho = np.where(overlap > 0.0,
                           np.log(overlap) - np.log(np.broadcast_to(
                               rmin, overlap.shape)),
                           -np.inf)

    f00 = link_inv(link, r00)
    f01 = link_inv(link, r01)
    f10 = link_inv(link, r10)
    b1 = f10[None, None, :] - f00[:, None, None]
    b2 = f01[None, :, None] - f00[:, None, None]

    def loglik_for(beta3: float) -> np.ndarray:
        total = np.zeros((n0, n1, n2))
        for xi, yi, ti in zip(xs, ys, ts):
            eta = (f00[:, None, None] + b1 * xi + b2 * yi + beta3 * xi * yi)
            g = np.clip(link_cdf(link, eta), 1e-12, 1 - 1e-12)
            total += np.log(g) if ti == 1 else np.log1p(-g)
        return total

    if interaction:
        _, bmids, bwidths = _beta_grid(n3)
        shape, rate = prior.gamma_shape, prior.gamma_rate
        log_bprior = (shape - 1.0) * np.log(bmids) - rate * bmids + np.log(bwidths)
        # pass 1: global max of the joint log weight
        gmax = -np.inf
        slabs_max = np.empty(n3)
        for j in range(n3):
            lw = log_rho + loglik_for(float(bmids[j])) + log_bprior[j]
            slabs_max[j] = lw.max()
            gmax = max(gmax, slabs_max[j])
        # pass 2: accumulate marginal masses
        m0 = np.zeros(n0)
        m1 = np.zeros(n1)
        m2 = np.zeros(n2)
        m3 = np.zeros(n3)
        for j in range(n3):
            if slabs_max[j] - gmax < -700.0:
                continue
            w = np.exp(log_rho + loglik_for(float(bmids[j])) + log_bprior[j] - gmax)
            m0 += w.sum(axis=(1, 2))
            m1 += w.sum(axis=(0, 2))
            m2 += w.sum(axis=(0, 1))
            m3[j] = w.sum()
        bedges = _beta_grid(n3)[0]
        med3 = _interp_median(bedges, m3)
    else:
        lw = log_rho + loglik_for(0.0)
        w = np.exp(lw - lw.max())
        m0 = w.sum(axis=(1, 2))
        m1 = w.sum(axis=(0, 2))
        m2 = w.sum(axis=(0, 1))
        med3 = 0.0

    return (_interp_median(e0, m0), _interp_median(e1, m1),
            _interp_median(e2, m2), med3)


def gamma_per_draw(draws: PosteriorDraws, theta: float, axis: ConditionalAxis,
                   conditioning_dose) -> np.ndarray:
    """Conditional MTD for every draw, clipped to the standardized range."""
    vals = draws.values
    f00 = link_inv(draws.link, vals[:, 0])
    f01 = link_inv(draws.link, vals[:, 1])
    f10 = link_inv(draws.link, vals[:, 2])
    ftheta = link_inv(draws.link, theta)
    d = np.asarray(conditioning_dose, dtype=float)
    if axis is ConditionalAxis.A_GIVEN_B:
        num = (ftheta - f00) - (f01 - f00) * d
        den = (f10 - f00) + vals[:, 3] * d
    else:
        num = (ftheta - f00) - (f10 - f00) * d
        den = (f01 - f00) + vals[:, 3] * d
    return np.clip(num / den, 0.0, 1.0)


def posterior_quantile_gamma(draws: PosteriorDraws, theta: float,
                             axis: ConditionalAxis, conditioning_dose: float,
                             alpha: float) -> float:
    """Empirical alpha-quantile (type-7) of the clipped conditional MTD."""
    if len(draws) == 0:
        raise StateError("posterior draws are empty")
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    return float(np.quantile(gamma_per_draw(draws, theta, axis,
                                            conditioning_dose), alpha))
