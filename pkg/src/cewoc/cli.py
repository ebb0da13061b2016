"""Command-line interface.

Subcommands:

* ``simulate`` -- run a replicated experiment and persist its report.
* ``opchar``   -- print safety rows for a stored report, optionally compare
  two reports, and render the report figures.
* ``next-dose`` -- one-shot cohort recommendation from a transcript CSV.
* ``serve``    -- start the live trial-conduct HTTP service.

All randomness is controlled by the ``--seed`` arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .design import (DesignConfig, TrialState, TrialStatus, next_cohort_doses,
                     schedule_alpha)
from .errors import CewocError
from .harness import (ComparisonTable, ExperimentConfig, OpCharReport,
                      compare_experiments, load_report, run_experiment)
from .links import LinkKind
from .model import TrialData, DosePair
from .posterior import PriorSpec, SamplerConfig, fit_seed, sample_posterior
from .truths import (ReparamLinkTruth, scenario, shifted_link_truth,
                     truth_from_dict)


def _add_sampler_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, default=6000,
                   help="MCMC iterations per posterior refresh")
    p.add_argument("--burnin", type=int, default=2000)
    p.add_argument("--thin", type=int, default=2)


def _add_design_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", type=float, default=0.33,
                   help="target DLT probability")
    p.add_argument("--n", type=int, default=40, help="total patients")
    p.add_argument("--alpha-start", type=float, default=0.25)
    p.add_argument("--alpha-increment", type=float, default=0.05)
    p.add_argument("--alpha-cap", type=float, default=0.5)
    p.add_argument("--step-cap", type=float, default=0.20,
                   help="max per-cohort escalation per axis")
    p.add_argument("--n1", type=int, default=10,
                   help="patients before the stopping rule applies")
    p.add_argument("--xi1", type=float, default=0.05)
    p.add_argument("--xi2", type=float, default=0.80)


def _design_from_args(args) -> DesignConfig:
    return DesignConfig(theta=args.theta, n_max=args.n,
                        alpha_start=args.alpha_start,
                        alpha_increment=args.alpha_increment,
                        alpha_cap=args.alpha_cap,
                        escalation_step_cap=args.step_cap,
                        stop_n1=args.n1, stop_xi1=args.xi1, stop_xi2=args.xi2)


def _sampler_from_args(args, seed: int) -> SamplerConfig:
    return SamplerConfig(n_iterations=args.iterations, n_burnin=args.burnin,
                         thin=args.thin, seed=seed)


def _resolve_scenario(name: str, truth_link: str, theta: float):
    if Path(name).suffix == ".json" or Path(name).exists():
        with open(name) as fh:
            truth = truth_from_dict(json.load(fh))
        label = Path(name).stem
    else:
        truth = scenario(name)
        label = name
    link = LinkKind.parse(truth_link)
    if link is not LinkKind.LOGISTIC:
        if not isinstance(truth, ReparamLinkTruth):
            raise CewocError("--truth-link applies only to link-model scenarios")
        truth = ReparamLinkTruth(shifted_link_truth(truth.params, link, theta))
        label = f"{label}-{link.value}"
    return truth, label


def _cmd_simulate(args) -> int:
    truth, label = _resolve_scenario(args.scenario, args.truth_link, args.theta)
    config = ExperimentConfig(
        scenario=truth,
        working_link=LinkKind.parse(args.link),
        interaction=not args.no_interaction,
        design=_design_from_args(args),
        prior=PriorSpec(),
        sampler=_sampler_from_args(args, args.seed),
        replicates=args.replicates,
        base_seed=args.seed,
        tolerance_p=args.p,
        output_dir=args.out,
        scenario_name=label,
        n_jobs=args.jobs)
    report = run_experiment(config)
    s = report.safety
    print(f"{label} link={args.link} interaction={not args.no_interaction} "
          f"m={args.replicates}")
    print(f"  avg %DLT = {s.avg_pct_dlt:.2f}   "
          f"%trials DLT>theta+0.05 = {s.pct_trials_over_theta_plus_005:.2f}   "
          f"%trials DLT>theta+0.10 = {s.pct_trials_over_theta_plus_010:.2f}")
    print(f"  report written to {args.out}")
    return 0


def _print_safety_row(tag: str, report: OpCharReport) -> None:
    s = report.safety
    meta = report.metadata
    model = ("interaction" if meta["interaction"] else "no-interaction")
    print(f"{tag:10s} {meta['scenario_name']:>12s} {meta['working_link']:>9s} "
          f"{model:>15s} {s.avg_pct_dlt:10.2f} "
          f"{s.pct_trials_over_theta_plus_005:12.2f} "
          f"{s.pct_trials_over_theta_plus_010:12.2f}")


def _write_comparison(out: Path, table: ComparisonTable) -> None:
    with open(out / "comparison_safety.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["avg_pct_dlt_delta", "pct_over_005_delta",
                    "pct_over_010_delta"])
        w.writerow([repr(table.safety_delta.avg_pct_dlt),
                    repr(table.safety_delta.pct_trials_over_theta_plus_005),
                    repr(table.safety_delta.pct_trials_over_theta_plus_010)])
    with open(out / "comparison_curves.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["grid_x", "grid_y", "bias_delta", "selection_delta"])
        for x, y, b, s in zip(table.grid_x, table.grid_y, table.bias_delta,
                              table.selection_delta):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(b)),
                        repr(float(s))])


def _cmd_opchar(args) -> int:
    report = load_report(args.indir)
    out = Path(args.out if args.out else args.indir)
    out.mkdir(parents=True, exist_ok=True)
    print(f"{'report':10s} {'scenario':>12s} {'link':>9s} {'model':>15s} "
          f"{'avg %DLT':>10s} {'%>th+0.05':>12s} {'%>th+0.10':>12s}")
    _print_safety_row("A", report)
    compare = None
    if args.compare:
        compare = load_report(args.compare)
        _print_safety_row("B", compare)
        table = compare_experiments(report, compare)
        d = table.safety_delta
        print(f"delta A-B: avg %DLT {d.avg_pct_dlt:+.2f}, "
              f"%>theta+0.05 {d.pct_trials_over_theta_plus_005:+.2f}, "
              f"%>theta+0.10 {d.pct_trials_over_theta_plus_010:+.2f}")
        _write_comparison(out, table)
        print(f"comparison files written to {out}")
    if not args.no_figures:
        from .report import render_report_figures
        created = render_report_figures(report, out, compare)
        print("figures: " + ", ".join(p.name for p in created))
    return 0


def _read_transcript(path: str, theta: float) -> TrialData:
    data = TrialData(target_theta=theta)
    with open(path, newline="") as fh:
        rows = sorted(csv.DictReader(fh), key=lambda r: int(r["index"]))
    for row in rows:
        data.add(DosePair(float(row["x"]), float(row["y"])), int(row["t"]))
    return data


def _cmd_next_dose(args) -> int:
    data = _read_transcript(args.data, args.theta)
    k = len(data)
    if k < 2 or k % 2 != 0:
        raise CewocError("transcript must hold complete cohorts of two")
    if not (0.0 < args.alpha <= 0.5):
        raise CewocError("--alpha must lie in (0, 0.5]")
    cohort = k // 2 + 1
    link = LinkKind.parse(args.link)
    sampler = _sampler_from_args(args, args.seed)
    draws = sample_posterior(data, PriorSpec(), sampler, link,
                             not args.no_interaction,
                             seed=fit_seed(args.seed, k))
    config = DesignConfig(theta=args.theta, n_max=k + 2,
                          alpha_start=args.alpha, alpha_increment=0.0,
                          alpha_cap=args.alpha,
                          escalation_step_cap=args.step_cap, stop_n1=k + 2)
    state = TrialState(data=data, next_cohort_index=cohort,
                       current_alpha=args.alpha, status=TrialStatus.ENROLLING,
                       pending_doses=None)
    d1, d2 = next_cohort_doses(state, draws, config)
    payload = {
        "cohort": cohort,
        "alpha": args.alpha,
        "patients": [
            {"index": k + 1, "x": d1.x, "y": d1.y},
            {"index": k + 2, "x": d2.x, "y": d2.y},
        ],
        "acceptance_rates": list(draws.acceptance_rates),
    }
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    console = Path(args.console) if args.console else Path("frontend/dist")
    app = create_app(Path(args.state),
                     console_dir=console if console.is_dir() else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cewoc",
        description="Two-drug conditional-EWOC dose finding: simulator, "
                    "reports and live trial service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a replicated experiment")
    p.add_argument("--scenario", required=True,
                   help="s1|s2|s3|s4 or a truth-model JSON file")
    p.add_argument("--link", default="logistic",
                   choices=["logistic", "probit", "cloglog"],
                   help="working-model link")
    p.add_argument("--truth-link", default="logistic",
                   choices=["logistic", "probit", "cloglog"],
                   help="generate outcomes from an intercept-shifted truth")
    p.add_argument("--no-interaction", action="store_true",
                   help="pin the interaction coefficient at zero")
    p.add_argument("--replicates", "-m", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--p", type=float, default=0.1,
                   help="tolerance probability for percent selection")
    p.add_argument("--jobs", type=int, default=1)
    _add_design_args(p)
    _add_sampler_args(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("opchar", help="summarize / compare stored reports")
    p.add_argument("--in", dest="indir", required=True)
    p.add_argument("--compare", default=None)
    p.add_argument("--out", default=None,
                   help="where to write comparison files and figures "
                        "(default: the --in directory)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=_cmd_opchar)

    p = sub.add_parser("next-dose",
                       help="one-shot recommendation from a transcript CSV "
                            "(columns: index,x,y,t)")
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--no-interaction", action="store_true")
    p.add_argument("--link", default="logistic",
                   choices=["logistic", "probit", "cloglog"])
    p.add_argument("--theta", type=float, default=0.33)
    p.add_argument("--step-cap", type=float, default=0.20)
    p.add_argument("--seed", type=int, required=True)
    _add_sampler_args(p)
    p.set_defaults(fn=_cmd_next_dose)

    p = sub.add_parser("serve", help="start the trial-conduct API")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--state", required=True, help="state directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--console", default=None,
                   help="built console directory to serve at / "
                        "(default: frontend/dist when present)")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CewocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
