"""Replicated-trial experiment runner and its on-disk report format.

An experiment is one (scenario, working model) cell: m independent trials
whose per-replicate seeds are derived by mixing the replicate index into
the base seed, so any single replicate can be reproduced in isolation and
parallel execution order cannot change results.  Reports persist as flat
delimited files plus a config echo, which feed the CLI report path, the
acceptance suite and the console.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .design import (DesignConfig, MtdCurveEstimate, TrialRunResult,
                     TrialStatus, run_trial)
from .errors import ConfigError, DomainError
from .links import LinkKind
from .metrics import (PointwiseCurveStats, ReplicateResult, SafetySummary,
                      aggregated_curve, curve_stats, last_dose_cloud,
                      safety_summary)
from .posterior import PriorSpec, SamplerConfig
from .truths import TruthModel, true_curve_grid, truth_from_dict, truth_to_dict

TRUE_CURVE_POINTS = 201
ESTIMATE_CURVE_POINTS = 501


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: TruthModel
    working_link: LinkKind
    interaction: bool
    design: DesignConfig
    prior: PriorSpec
    sampler: SamplerConfig
    replicates: int
    base_seed: int
    tolerance_p: float
    output_dir: str
    scenario_name: str = "custom"
    n_jobs: int = 1

    def __post_init__(self):
        if self.replicates <= 0:
            raise ConfigError("replicate count must be positive")
        if not (0.0 < self.tolerance_p < 1.0):
            raise ConfigError("tolerance probability must lie in (0, 1)")
        if self.n_jobs <= 0:
            raise ConfigError("n_jobs must be positive")


@dataclass(frozen=True)
class SafetyRow:
    replicate: int
    n_treated: int
    dlt_count: int
    status: str


@dataclass
class OpCharReport:
    safety: SafetySummary
    safety_rows: list[SafetyRow]
    curve: PointwiseCurveStats
    aggregated: MtdCurveEstimate
    last_doses: np.ndarray
    metadata: dict
    replicate_results: list[ReplicateResult] = field(default_factory=list)


def replicate_seed(base_seed: int, replicate: int) -> int:
    """64-bit per-replicate seed; the SeedSequence pool mixes the index in."""
    return int(np.random.SeedSequence((int(base_seed), int(replicate)))
               .generate_state(1, np.uint64)[0])


def _config_echo(config: ExperimentConfig) -> dict:
    return {
        "scenario": truth_to_dict(config.scenario),
        "scenario_name": config.scenario_name,
        "working_link": config.working_link.value,
        "interaction": config.interaction,
        "design": {
            "theta": config.design.theta,
            "n_max": config.design.n_max,
            "alpha_start": config.design.alpha_start,
            "alpha_increment": config.design.alpha_increment,
            "alpha_cap": config.design.alpha_cap,
            "escalation_step_cap": config.design.escalation_step_cap,
            "stop_n1": config.design.stop_n1,
            "stop_xi1": config.design.stop_xi1,
            "stop_xi2": config.design.stop_xi2,
        },
        "prior": {"gamma_mean": config.prior.gamma_mean,
                  "gamma_variance": config.prior.gamma_variance},
        "sampler": {"n_iterations": config.sampler.n_iterations,
                    "n_burnin": config.sampler.n_burnin,
                    "thin": config.sampler.thin,
                    "adapt_interval": config.sampler.adapt_interval,
                    "target_accept": config.sampler.target_accept},
        "replicates": config.replicates,
        "base_seed": config.base_seed,
        "tolerance_p": config.tolerance_p,
        "true_curve_points": TRUE_CURVE_POINTS,
        "estimate_curve_points": ESTIMATE_CURVE_POINTS,
    }


def _run_replicate(args) -> TrialRunResult:
    config, replicate = args
    return run_trial(config.scenario, config.design, config.prior,
                     config.sampler, config.working_link, config.interaction,
                     seed=replicate_seed(config.base_seed, replicate))


def _to_replicate_result(run: TrialRunResult) -> ReplicateResult:
    return ReplicateResult(transcript=run.data, estimate=run.estimate,
                           status=run.status,
                           last_cohort_doses=run.last_cohort_doses,
                           dlt_count=run.data.dlt_count())


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def run_experiment(config: ExperimentConfig) -> OpCharReport:
    """Run all replicates, compute operating characteristics, persist them."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = _config_echo(config)
    with open(out / "config.json", "w") as fh:  # fails early if unwritable
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")

    jobs = [(config, j) for j in range(config.replicates)]
    if config.n_jobs > 1:
        with ProcessPoolExecutor(max_workers=config.n_jobs) as pool:
            runs = list(pool.map(_run_replicate, jobs, chunksize=4))
    else:
        runs = [_run_replicate(job) for job in jobs]
    results = [_to_replicate_result(r) for r in runs]

    theta = config.design.theta
    grid_x, grid_y = true_curve_grid(config.scenario, theta, TRUE_CURVE_POINTS)
    stats = curve_stats(results, grid_x, grid_y, config.tolerance_p,
                        ESTIMATE_CURVE_POINTS)
    summary = safety_summary(results, theta)
    agg = aggregated_curve(results)
    cloud = last_dose_cloud(results)
    rows = [SafetyRow(replicate=j, n_treated=len(res.transcript),
                      dlt_count=res.dlt_count, status=res.status.value)
            for j, res in enumerate(results)]

    _write_csv(out / "safety.csv",
               ["replicate", "n_treated", "dlt_count", "status"],
               [[r.replicate, r.n_treated, r.dlt_count, r.status]
                for r in rows])
    _write_csv(out / "bias.csv", ["grid_x", "grid_y", "value"],
               [[_fmt(x), _fmt(y), _fmt(v)]
                for x, y, v in zip(stats.grid_x, stats.grid_y, stats.bias)])
    _write_csv(out / "selection.csv", ["grid_x", "grid_y", "value"],
               [[_fmt(x), _fmt(y), _fmt(v)] for x, y, v in
                zip(stats.grid_x, stats.grid_y, stats.percent_selection)])
    _write_csv(out / "aggregated_curve.csv",
               ["rho00_hat", "rho01_hat", "rho10_hat", "beta3_hat", "link",
                "theta", "interaction"],
               [[_fmt(agg.rho00_hat), _fmt(agg.rho01_hat), _fmt(agg.rho10_hat),
                 _fmt(agg.beta3_hat), agg.link.value, _fmt(agg.theta),
                 int(agg.interaction)]])
    _write_csv(out / "last_doses.csv", ["replicate", "patient", "x", "y"],
               [[j, pat, _fmt(dose.x), _fmt(dose.y)]
                for j, res in enumerate(results)
                for pat, dose in zip((len(res.transcript) - 1,
                                      len(res.transcript)),
                                     res.last_cohort_doses)])

    return OpCharReport(safety=summary, safety_rows=rows, curve=stats,
                        aggregated=agg, last_doses=cloud, metadata=echo,
                        replicate_results=results)


def load_report(directory: str | Path) -> OpCharReport:
    """Rehydrate a persisted report (aggregates only, no transcripts)."""
    d = Path(directory)
    if not (d / "config.json").exists():
        raise DomainError(f"{d} does not hold an experiment report")
    with open(d / "config.json") as fh:
        meta = json.load(fh)
    theta = meta["design"]["theta"]

    with open(d / "safety.csv", newline="") as fh:
        rows = [SafetyRow(int(r["replicate"]), int(r["n_treated"]),
                          int(r["dlt_count"]), r["status"])
                for r in csv.DictReader(fh)]
    rates = np.array([r.dlt_count / r.n_treated for r in rows])
    total = sum(r.n_treated for r in rows)
    summary = SafetySummary(
        avg_pct_dlt=100.0 * sum(r.dlt_count for r in rows) / total,
        pct_trials_over_theta_plus_005=100.0 * float(np.mean(rates > theta + 0.05)),
        pct_trials_over_theta_plus_010=100.0 * float(np.mean(rates > theta + 0.10)))

    def read_curve(name):
        with open(d / name, newline="") as fh:
            data = [(float(r["grid_x"]), float(r["grid_y"]), float(r["value"]))
                    for r in csv.DictReader(fh)]
        return (np.array([v[0] for v in data]), np.array([v[1] for v in data]),
                np.array([v[2] for v in data]))

    bx, by, bias = read_curve("bias.csv")
    _, _, selection = read_curve("selection.csv")
    stats = PointwiseCurveStats(grid_x=bx, grid_y=by, bias=bias,
                                percent_selection=selection,
                                tolerance_p=meta["tolerance_p"])

    with open(d / "aggregated_curve.csv", newline="") as fh:
        row = next(csv.DictReader(fh))
    agg = MtdCurveEstimate(float(row["rho00_hat"]), float(row["rho01_hat"]),
                           float(row["rho10_hat"]), float(row["beta3_hat"]),
                           LinkKind.parse(row["link"]), float(row["theta"]),
                           interaction=bool(int(row["interaction"])))

    with open(d / "last_doses.csv", newline="") as fh:
        cloud = np.array([[float(r["x"]), float(r["y"])]
                          for r in csv.DictReader(fh)])

    return OpCharReport(safety=summary, safety_rows=rows, curve=stats,
                        aggregated=agg, last_doses=cloud, metadata=meta)


@dataclass(frozen=True)
class ComparisonTable:
    safety_delta: SafetySummary
    grid_x: np.ndarray
    grid_y: np.ndarray
    bias_delta: np.ndarray
    selection_delta: np.ndarray


def compare_experiments(report_a: OpCharReport,
                        report_b: OpCharReport) -> ComparisonTable:
    """Element-wise differences (a minus b); no statistical testing."""
    ma, mb = report_a.metadata, report_b.metadata
    if ma["scenario"] != mb["scenario"]:
        raise DomainError("reports use different scenarios")
    if ma["design"]["theta"] != mb["design"]["theta"]:
        raise DomainError("reports use different target rates")
    if (len(report_a.curve.grid_x) != len(report_b.curve.grid_x)
            or not np.allclose(report_a.curve.grid_x, report_b.curve.grid_x)):
        raise DomainError("reports use different true-curve grids")
    sa, sb = report_a.safety, report_b.safety
    return ComparisonTable(
        safety_delta=SafetySummary(
            sa.avg_pct_dlt - sb.avg_pct_dlt,
            sa.pct_trials_over_theta_plus_005 - sb.pct_trials_over_theta_plus_005,
            sa.pct_trials_over_theta_plus_010 - sb.pct_trials_over_theta_plus_010),
        grid_x=report_a.curve.grid_x,
        grid_y=report_a.curve.grid_y,
        bias_delta=report_a.curve.bias - report_b.curve.bias,
        selection_delta=(report_a.curve.percent_selection
                         - report_b.curve.percent_selection))


def experiment_config_from_dict(payload: dict, output_dir: str,
                                n_jobs: int = 1) -> ExperimentConfig:
    """Rebuild an ExperimentConfig from a config.json echo."""
    d = payload["design"]
    return ExperimentConfig(
        scenario=truth_from_dict(payload["scenario"]),
        working_link=LinkKind.parse(payload["working_link"]),
        interaction=bool(payload["interaction"]),
        design=DesignConfig(**d),
        prior=PriorSpec(**payload["prior"]),
        sampler=SamplerConfig(**payload["sampler"]),
        replicates=int(payload["replicates"]),
        base_seed=int(payload["base_seed"]),
        tolerance_p=float(payload["tolerance_p"]),
        output_dir=output_dir,
        scenario_name=payload.get("scenario_name", "custom"),
        n_jobs=n_jobs)
