import numpy as np
import pytest

from cewoc import (DosePair, LinkKind, ModelParams, PriorSpec, SamplerConfig,
                   TrialData)


@pytest.fixture
def scenario1_params() -> ModelParams:
    return ModelParams(0.01, 0.6, 0.6, 40.0)


@pytest.fixture
def prior() -> PriorSpec:
    return PriorSpec()


@pytest.fixture
def fast_sampler() -> SamplerConfig:
    return SamplerConfig(n_iterations=1600, n_burnin=500, thin=2, seed=11)


def make_trial_data(rows, theta=0.33) -> TrialData:
    data = TrialData(target_theta=theta)
    for x, y, t in rows:
        data.add(DosePair(x, y), t)
    return data


def random_valid_params(rng: np.random.Generator,
                        link=LinkKind.LOGISTIC,
                        interaction=True) -> ModelParams:
    rho01 = rng.uniform(0.02, 0.98)
    rho10 = rng.uniform(0.02, 0.98)
    rho00 = rng.uniform(0.001, 0.999) * min(rho01, rho10)
    beta3 = rng.gamma(0.8167, 25.714) if interaction else 0.0
    return ModelParams(rho00, rho01, rho10, beta3, link,
                       interaction_enabled=interaction)
