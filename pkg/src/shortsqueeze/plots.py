"""Figure rendering for sweeps and case studies.

Renders to files only (Agg backend), so it works headless and never blocks
on a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import Branch, PhysicalSnapshot, to_adv_units
from .scenario import GridKind, SweepSpec, SweepTable, case_study, sweep

_BRANCH_STYLE = {
    Branch.NO_CALL: dict(color="tab:blue", label="no margin call"),
    Branch.CALL: dict(color="tab:red", label="margin call"),
}


def save_sweep_figure(table: SweepTable, path: str | Path, title: str | None = None) -> Path:
    """Plot clearing price against external capital and write a PNG.

    Branch segments are colored separately; an annotated jump is marked
    with a dashed vertical line at the threshold.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for branch, style in _BRANCH_STYLE.items():
        xs = [r.c for r in table.rows if r.branch is branch]
        ys = [r.price for r in table.rows if r.branch is branch]
        if xs:
            ax.plot(xs, ys, marker=".", markersize=3, linewidth=1.2, **style)
    if table.c_star is not None:
        ax.axvline(table.c_star, color="gray", linestyle="--", linewidth=1.0)
        ax.text(
            table.c_star,
            0.5 * (table.rows[0].price + table.rows[-1].price),
            f"  jump = {table.delta:.4g}",
            fontsize=9,
            color="gray",
        )
    ax.set_xlabel("external capital c (fraction of ADV value)")
    ax.set_ylabel("clearing price (pre-event price = 1)")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_case_study_figure(snapshot: PhysicalSnapshot, path: str | Path) -> Path:
    """Render one snapshot's capital sweep in dollar prices and write a PNG."""
    path = Path(path)
    params = to_adv_units(snapshot)
    report = case_study(snapshot)
    c_max = 2.0 * report.c_star if report.c_star > 0 else 0.1
    spec = SweepSpec(0.0, c_max, 201, GridKind.UNIFORM_PLUS_THRESHOLD)
    table = sweep(spec, params)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for branch, style in _BRANCH_STYLE.items():
        xs = [r.c for r in table.rows if r.branch is branch]
        ys = [r.price * snapshot.price_usd for r in table.rows if r.branch is branch]
        if xs:
            ax.plot(xs, ys, marker=".", markersize=3, linewidth=1.2, **style)
    ax.axhline(report.pre_price_usd, color="gray", linestyle=":", linewidth=1.0)
    if report.squeeze:
        ax.axvline(report.c_star, color="gray", linestyle="--", linewidth=1.0)
        ax.axhline(report.post_price_usd, color="tab:red", linestyle=":", linewidth=1.0)
        ax.text(
            0.0,
            report.post_price_usd,
            f" post-squeeze ${report.post_price_usd:.2f}",
            fontsize=9,
            color="tab:red",
            va="bottom",
        )
    label = " ".join(x for x in (report.ticker, report.date) if x)
    ax.set_xlabel("external capital c (fraction of ADV value)")
    ax.set_ylabel("clearing price (USD)")
    ax.set_title(label or "case study")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
