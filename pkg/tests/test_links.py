import math

import numpy as np
import pytest
from scipy.special import ndtri

from cewoc import DomainError, LinkKind, link_cdf, link_inv
from cewoc import _mcmc

ALL_LINKS = list(LinkKind)

# grids kept inside the float-representable range of each cdf
CDF_GRIDS = {
    LinkKind.LOGISTIC: np.linspace(-30.0, 30.0, 401),
    LinkKind.PROBIT: np.linspace(-7.5, 7.5, 401),
    LinkKind.CLOGLOG: np.linspace(-30.0, 3.0, 401),
}


def test_cdf_reference_values():
    assert link_cdf(LinkKind.LOGISTIC, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert link_cdf(LinkKind.PROBIT, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert link_cdf(LinkKind.CLOGLOG, 0.0) == pytest.approx(1.0 - math.exp(-1.0),
                                                            abs=1e-12)


def test_inv_reference_values():
    assert link_inv(LinkKind.LOGISTIC, 0.33) == pytest.approx(
        math.log(0.33 / 0.67), abs=1e-12)
    assert link_inv(LinkKind.PROBIT, 0.5) == pytest.approx(0.0, abs=1e-9)
    assert link_inv(LinkKind.CLOGLOG, 0.33) == pytest.approx(
        math.log(-math.log(0.67)), abs=1e-12)


@pytest.mark.parametrize("kind", ALL_LINKS)
def test_round_trip(kind):
    ps = np.geomspace(1e-6, 0.5, 60)
    ps = np.concatenate([ps, 1.0 - ps])
    back = link_cdf(kind, link_inv(kind, ps))
    assert np.max(np.abs(back - ps)) <= 1e-10


@pytest.mark.parametrize("kind", ALL_LINKS)
def test_cdf_strictly_increasing(kind):
    grid = CDF_GRIDS[kind]
    vals = link_cdf(kind, grid)
    assert np.all(np.diff(vals) > 0)
    assert np.all((vals > 0.0) & (vals < 1.0))


@pytest.mark.parametrize("kind", [LinkKind.LOGISTIC, LinkKind.PROBIT])
def test_logistic_probit_symmetry(kind):
    ps = np.linspace(0.01, 0.99, 99)
    assert np.max(np.abs(link_inv(kind, ps) + link_inv(kind, 1.0 - ps))) <= 1e-10


def test_cloglog_is_asymmetric():
    assert abs(link_inv(LinkKind.CLOGLOG, 0.3)
               + link_inv(LinkKind.CLOGLOG, 0.7)) > 1e-3


def test_probit_inverse_matches_scipy():
    ps = np.concatenate([np.geomspace(1e-11, 0.5, 200),
                         1.0 - np.geomspace(1e-11, 0.4, 200)])
    assert np.max(np.abs(link_inv(LinkKind.PROBIT, ps) - ndtri(ps))) <= 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        link_cdf(LinkKind.LOGISTIC, float("nan"))
    with pytest.raises(DomainError):
        link_cdf(LinkKind.PROBIT, float("inf"))
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(DomainError):
            link_inv(LinkKind.LOGISTIC, bad)


def test_extreme_probabilities_clamped_not_rejected():
    # inside (0,1) but beyond the clamp: must invert finitely
    for kind in ALL_LINKS:
        lo = link_inv(kind, 1e-15)
        hi = link_inv(kind, 1.0 - 1e-15)
        assert math.isfinite(lo) and math.isfinite(hi)
        assert lo == link_inv(kind, 1e-12)


def test_compiled_scalar_twins_agree():
    ids = {LinkKind.LOGISTIC: _mcmc.LOGISTIC, LinkKind.PROBIT: _mcmc.PROBIT,
           LinkKind.CLOGLOG: _mcmc.CLOGLOG}
    for kind, grid in CDF_GRIDS.items():
        for u in grid[::10]:
            assert _mcmc.link_cdf_scalar(ids[kind], float(u)) == pytest.approx(
                link_cdf(kind, float(u)), abs=1e-13)
    ps = np.linspace(0.001, 0.999, 97)
    for kind in ALL_LINKS:
        for p in ps:
            assert _mcmc.link_inv_scalar(ids[kind], float(p)) == pytest.approx(
                link_inv(kind, float(p)), rel=1e-12, abs=1e-12)
