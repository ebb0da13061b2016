import json
from pathlib import Path

import numpy as np
import pytest

from cewoc import (DesignConfig, DomainError, ExperimentConfig, LinkKind,
                   PriorSpec, SamplerConfig, compare_experiments, load_report,
                   replicate_seed, run_experiment, run_trial, scenario)
from cewoc.harness import experiment_config_from_dict

TINY_SAMPLER = SamplerConfig(n_iterations=1010, n_burnin=10, thin=2, seed=0)


def _tiny_config(out: Path, **overrides) -> ExperimentConfig:
    base = dict(
        scenario=scenario("s1"),
        working_link=LinkKind.LOGISTIC,
        interaction=True,
        design=DesignConfig(theta=0.33, n_max=4, stop_n1=4),
        prior=PriorSpec(),
        sampler=TINY_SAMPLER,
        replicates=3,
        base_seed=414243,
        tolerance_p=0.1,
        output_dir=str(out),
        scenario_name="s1")
    base.update(overrides)
    return ExperimentConfig(**base)


def test_replicate_seeds_distinct():
    seeds = {replicate_seed(5, j) for j in range(1000)}
    assert len(seeds) == 1000
    assert replicate_seed(5, 0) != replicate_seed(6, 0)


def test_run_experiment_persists_all_files(tmp_path):
    report = run_experiment(_tiny_config(tmp_path / "r"))
    for name in ("config.json", "safety.csv", "bias.csv", "selection.csv",
                 "aggregated_curve.csv", "last_doses.csv"):
        assert (tmp_path / "r" / name).exists(), name
    assert len(report.safety_rows) == 3
    assert report.last_doses.shape == (6, 2)
    assert len(report.curve.grid_x) == 201
    meta = json.loads((tmp_path / "r" / "config.json").read_text())
    assert meta["design"]["stop_xi2"] == 0.80
    assert meta["base_seed"] == 414243
    assert "output_dir" not in meta


def test_run_experiment_deterministic_bytes(tmp_path):
    run_experiment(_tiny_config(tmp_path / "a"))
    run_experiment(_tiny_config(tmp_path / "b"))
    for name in ("config.json", "safety.csv", "bias.csv", "selection.csv",
                 "aggregated_curve.csv", "last_doses.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes(), name


def test_parallel_pool_matches_serial(tmp_path):
    run_experiment(_tiny_config(tmp_path / "serial"))
    run_experiment(_tiny_config(tmp_path / "pool", n_jobs=2))
    for name in ("safety.csv", "bias.csv", "selection.csv",
                 "aggregated_curve.csv", "last_doses.csv"):
        assert (tmp_path / "serial" / name).read_bytes() == \
            (tmp_path / "pool" / name).read_bytes(), name


def test_single_replicate_reduces_to_run_trial(tmp_path):
    config = _tiny_config(tmp_path / "one", replicates=1)
    report = run_experiment(config)
    direct = run_trial(config.scenario, config.design, config.prior,
                       config.sampler, config.working_link, config.interaction,
                       seed=replicate_seed(config.base_seed, 0))
    assert report.safety_rows[0].dlt_count == direct.data.dlt_count()
    assert report.aggregated == direct.estimate
    assert np.allclose(report.last_doses,
                       [[d.x, d.y] for d in direct.last_cohort_doses])


def test_load_report_round_trip(tmp_path):
    out = tmp_path / "r"
    report = run_experiment(_tiny_config(out))
    loaded = load_report(out)
    assert loaded.safety == report.safety
    assert np.allclose(loaded.curve.bias, report.curve.bias)
    assert np.allclose(loaded.curve.percent_selection,
                       report.curve.percent_selection)
    assert loaded.aggregated == report.aggregated
    assert np.allclose(loaded.last_doses, report.last_doses)
    assert loaded.metadata == report.metadata
    with pytest.raises(DomainError):
        load_report(tmp_path / "missing")


def test_compare_experiments_self_is_zero(tmp_path):
    report = run_experiment(_tiny_config(tmp_path / "r"))
    table = compare_experiments(report, report)
    assert table.safety_delta.avg_pct_dlt == 0.0
    assert np.all(table.bias_delta == 0.0)
    assert np.all(table.selection_delta == 0.0)


def test_compare_experiments_rejects_mismatched_scenarios(tmp_path):
    a = run_experiment(_tiny_config(tmp_path / "a"))
    b = run_experiment(_tiny_config(tmp_path / "b", scenario=scenario("s3"),
                                    scenario_name="s3"))
    with pytest.raises(DomainError):
        compare_experiments(a, b)


def test_experiment_config_round_trip(tmp_path):
    config = _tiny_config(tmp_path / "r")
    report = run_experiment(config)
    rebuilt = experiment_config_from_dict(report.metadata, str(tmp_path / "x"))
    assert rebuilt.design == config.design
    assert rebuilt.sampler.n_iterations == config.sampler.n_iterations
    assert rebuilt.scenario == config.scenario
