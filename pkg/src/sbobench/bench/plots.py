"""SVG figures from a results CSV: status bars, normalized lengths, smoothness box plots."""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..metrics import RunRecord  # noqa: E402
from ..planners import Status  # noqa: E402
from .runner import read_results  # noqa: E402

STATUS_COLORS = {Status.EXACT: "#2a9d8f", Status.APPROXIMATE: "#e9c46a", Status.FAILURE: "#e76f51"}


class PlotError(ValueError):
    """Nothing to plot."""


def box_stats(values, whisker: float = 1.5) -> dict:
    """Median, quartiles (linear interpolation between order statistics) and whiskers at 1.5 IQR.

    Whiskers end at the most extreme data points inside the fences; points
    beyond them are returned as fliers.
    """
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise PlotError("box statistics need at least one value")
    q1, med, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - whisker * iqr, q3 + whisker * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    return {
        "med": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "whislo": float(inside.min()) if inside.size else float(q1),
        "whishi": float(inside.max()) if inside.size else float(q3),
        "fliers": x[(x < lo_fence) | (x > hi_fence)],
    }


def _planners(records: list[RunRecord]) -> list[str]:
    return list(dict.fromkeys(r.planner for r in records))


def status_shares(records) -> dict:
    """Per planner, the percentage of runs ending in each status."""
    out = {}
    for n in _planners(records):
        rows = [r for r in records if r.planner == n]
        out[n] = {st: 100.0 * sum(r.status is st for r in rows) / len(rows) for st in Status}
    return out


def status_figure(records, space: str, path: str) -> None:
    shares = status_shares(records)
    names = list(shares)
    fig, ax = plt.subplots(figsize=(1.2 * len(names) + 3, 4))
    bottom = np.zeros(len(names))
    for st in Status:
        share = np.array([shares[n][st] for n in names])
        ax.bar(names, share, bottom=bottom, label=st.value, color=STATUS_COLORS[st])
        bottom += share
    ax.set_ylabel("runs [%]")
    ax.set_ylim(0, 100)
    ax.set_title(f"{space}: solution status")
    ax.legend(loc="upper right", fontsize="small")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _box_figure(records, space, path, attr, ylabel, title, reference=None) -> None:
    names = _planners(records)
    stats, labels = [], []
    for n in names:
        vals = [getattr(r, attr) for r in records if r.planner == n and r.status is Status.EXACT]
        vals = [v for v in vals if v is not None]
        if vals:
            s = box_stats(vals)
            s["label"] = n
            stats.append(s)
            labels.append(n)
    fig, ax = plt.subplots(figsize=(1.2 * len(names) + 3, 4))
    if stats:
        ax.bxp(stats, showfliers=True)
    else:
        ax.text(0.5, 0.5, "no exact solutions", ha="center", va="center", transform=ax.transAxes)
    if reference is not None:
        ax.axhline(reference, color="k", linestyle="--", linewidth=1, label="ground truth")
        ax.legend(loc="upper right", fontsize="small")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def emit_plots(results_path: str | os.PathLike, out_dir: str | os.PathLike | None = None,
               space: str | None = None) -> list[str]:
    """Write the three figures for a results CSV and return their paths."""
    records = read_results(results_path)
    if not records:
        raise PlotError(f"{results_path}: no result rows")
    if space is None:
        meta = str(results_path) + ".meta.json"
        space = "results"
        if os.path.exists(meta):
            with open(meta, encoding="utf-8") as fh:
                space = json.load(fh).get("state_space", space)
    out_dir = out_dir or os.path.dirname(os.path.abspath(results_path))
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, f"{space}_{kind}.svg") for kind in ("status", "length", "smoothness")]
    status_figure(records, space, paths[0])
    _box_figure(records, space, paths[1], "normalized_length", "normalized length (ground truth = 100)",
                f"{space}: normalized solution length", reference=100.0)
    _box_figure(records, space, paths[2], "smoothness", "smoothness [rad]", f"{space}: smoothness")
    return paths
