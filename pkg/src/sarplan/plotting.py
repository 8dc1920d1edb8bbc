"""Matplotlib rendering of mission traces and benchmark summaries (SVG)."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simulator import Scenario, Trace  # noqa: E402

if TYPE_CHECKING:
    from .bench import BenchmarkReport

MODE_COLOURS = {"SWEEP": "#1f77b4", "SERVICE": "#d62728"}
ROI_STYLE = {
    "hidden": dict(marker="o", facecolor="none", edgecolor="0.5"),
    "detected": dict(marker="o", facecolor="#ff7f0e", edgecolor="#ff7f0e"),
    "serviced": dict(marker="o", facecolor="#2ca02c", edgecolor="#2ca02c"),
}

# fixed hash salt and no timestamp keep the SVG byte-stable
STABLE_RC = {
    "svg.hashsalt": "sarplan",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 7,
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def roi_states_from_events(trace: Trace, roi_ids) -> dict[int, str]:
    states = {rid: "hidden" for rid in roi_ids}
    for row in trace.rows:
        if not row.events:
            continue
        for ev in row.events.split(";"):
            kind, _, arg = ev.partition(":")
            if kind == "detect":
                states[int(arg)] = "detected"
            elif kind == "service":
                states[int(arg)] = "serviced"
    return states


def plot_trace(trace: Trace, scenario: Scenario, path) -> Path:
    """Render fence, sweep grid, mode-coloured flight path, ROIs and batch picks."""
    if not trace.rows:
        raise ValueError("cannot plot an empty trace")
    with plt.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(7.5, 5.2))

        fx = [p.x for p in scenario.fence.vertices] + [scenario.fence.vertices[0].x]
        fy = [p.y for p in scenario.fence.vertices] + [scenario.fence.vertices[0].y]
        ax.plot(fx, fy, color="k", lw=1.2, label="geofence")

        plan = scenario.coverage_plan()
        ax.plot([p.x for p in plan.waypoints], [p.y for p in plan.waypoints],
                color="0.75", lw=0.8, ls="--", label="lawn-mower grid")

        rows = trace.rows
        seen = set()
        start = 0
        for k in range(1, len(rows) + 1):
            if k == len(rows) or rows[k].mode != rows[start].mode:
                seg = rows[start:min(k + 1, len(rows))]
                mode = rows[start].mode
                ax.plot([r.x for r in seg], [r.y for r in seg], color=MODE_COLOURS[mode],
                        lw=1.4, zorder=3 if mode == "SERVICE" else 2, label=f"path ({mode})" if mode not in seen else None)
                seen.add(mode)
                start = k

        picks = [r for r in rows if "batch:" in r.events]
        if picks:
            ax.scatter([r.x for r in picks], [r.y for r in picks], marker="x", s=28,
                       color="k", zorder=4, label="batch selection")

        states = roi_states_from_events(trace, [r.id for r in scenario.rois])
        for name, style in ROI_STYLE.items():
            pts = [r.position for r in scenario.rois if states[r.id] == name]
            if pts:
                ax.scatter([p.x for p in pts], [p.y for p in pts], s=30, zorder=5,
                           label=f"ROI {name}", **style)

        ax.set_aspect("equal")
        ax.set_xlabel("East (m)")
        ax.set_ylabel("North (m)")
        ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0), frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def plot_bench(report: "BenchmarkReport", path) -> Path:
    """Mean mission time and median replan latency per planner, with paper values."""
    agg = report.aggregates["planners"]
    names = list(agg)
    with plt.rc_context(STABLE_RC):
        fig, (ax_t, ax_l) = plt.subplots(1, 2, figsize=(8.0, 3.4))
        xs = range(len(names))
        ax_t.bar(xs, [agg[n]["mean_time_s"] or 0.0 for n in names], color="#4c72b0",
                 label="simulated")
        paper = [agg[n].get("paper_time_s") for n in names]
        ax_t.scatter([x for x, v in zip(xs, paper) if v is not None],
                     [v for v in paper if v is not None], color="k", marker="_", s=400,
                     zorder=3, label="reported")
        ax_t.set_xticks(list(xs), names)
        ax_t.set_ylabel("time to service all ROIs (s)")
        ax_t.legend(frameon=False)

        ax_l.bar(xs, [agg[n]["median_latency_ms"] for n in names], color="#dd8452")
        ax_l.set_xticks(list(xs), names)
        ax_l.set_ylabel("median replan latency (ms)")
        ax_l.set_yscale("symlog", linthresh=0.01)
        fig.tight_layout()
        return _save(fig, path)
