"""Figure rendering for the report path.

The CLI report command writes these PNGs next to the delimited output:
the true vs aggregated MTD curves, the pointwise bias and percent-selection
profiles, and a binned map of the last treated combinations.  When a second
report is supplied the curve panels overlay both runs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import OpCharReport
from .model import mtd_curve_y
from .truths import true_curve_grid, truth_from_dict

plt.rcParams.update({
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
})


def _label(report: OpCharReport) -> str:
    meta = report.metadata
    tag = "interaction" if meta["interaction"] else "no-interaction"
    return f"{meta['scenario_name']} {meta['working_link']} ({tag})"


def _aggregated_xy(report: OpCharReport):
    xs = np.linspace(0.0, 1.0, 301)
    est = report.aggregated
    ys = mtd_curve_y(est.as_params(), est.theta, xs)
    keep = (ys >= 0.0) & (ys <= 1.0)
    return xs[keep], ys[keep]


def plot_mtd_curves(report: OpCharReport, path: Path,
                    compare: OpCharReport | None = None) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    truth = truth_from_dict(report.metadata["scenario"])
    theta = report.metadata["design"]["theta"]
    tx, ty = true_curve_grid(truth, theta, 201)
    ax.plot(tx, ty, "k-", lw=2, label="true MTD curve")
    ax.plot(*_aggregated_xy(report), "-", color="tab:blue",
            label=f"aggregated: {_label(report)}")
    if compare is not None:
        ax.plot(*_aggregated_xy(compare), "--", color="tab:red",
                label=f"aggregated: {_label(compare)}")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("standardized dose of drug A")
    ax.set_ylabel("standardized dose of drug B")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _profile_plot(report: OpCharReport, values_of, ylabel: str, path: Path,
                  compare: OpCharReport | None, hline: float | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.curve.grid_x, values_of(report), "-", color="tab:blue",
            label=_label(report))
    if compare is not None:
        ax.plot(compare.curve.grid_x, values_of(compare), "--",
                color="tab:red", label=_label(compare))
    if hline is not None:
        ax.axhline(hline, color="k", lw=0.8)
    ax.set_xlabel("standardized dose of drug A along the true curve")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_bias(report: OpCharReport, path: Path,
              compare: OpCharReport | None = None) -> None:
    _profile_plot(report, lambda r: r.curve.bias, "pointwise average bias",
                  path, compare, hline=0.0)


def plot_selection(report: OpCharReport, path: Path,
                   compare: OpCharReport | None = None) -> None:
    p = report.curve.tolerance_p
    _profile_plot(report, lambda r: r.curve.percent_selection,
                  f"pointwise percent selection (p={p:g})", path, compare)


def plot_last_doses(report: OpCharReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    cloud = report.last_doses
    h = ax.hist2d(cloud[:, 0], cloud[:, 1], bins=25,
                  range=[[0, 1], [0, 1]], cmap="viridis")
    fig.colorbar(h[3], ax=ax, label="patients")
    truth = truth_from_dict(report.metadata["scenario"])
    theta = report.metadata["design"]["theta"]
    tx, ty = true_curve_grid(truth, theta, 201)
    ax.plot(tx, ty, "w-", lw=1.5)
    ax.set_xlabel("standardized dose of drug A")
    ax.set_ylabel("standardized dose of drug B")
    ax.set_title(f"last treated combinations: {_label(report)}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_report_figures(report: OpCharReport, out_dir: str | Path,
                          compare: OpCharReport | None = None) -> list[Path]:
    """Write the full figure set; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    created = []
    for name, fn in (("mtd_curves.png",
                      lambda p: plot_mtd_curves(report, p, compare)),
                     ("bias.png", lambda p: plot_bias(report, p, compare)),
                     ("selection.png",
                      lambda p: plot_selection(report, p, compare)),
                     ("last_doses.png", lambda p: plot_last_doses(report, p))):
        path = out / name
        fn(path)
        created.append(path)
    return created
