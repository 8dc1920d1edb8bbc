"""Three-planner comparison harness (mission time and replan latency)."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import platform
import statistics
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .geometry import Geofence
from .planners import PLANNER_NAMES, PlannerConfig
from .simulator import gap_closure, generate_scenario, run_mission, table4_fence

# Values published for the 25-ROI, 600 m x 400 m, 5 m/s experiment.
PAPER_TABLE4 = {
    "NNH": {"algorithm": "Nearest Neighbour Heuristic (NNH)", "approach": "Purely Greedy",
            "time_s": 415.0, "latency_ms": 2.0},
    "OPT": {"algorithm": "Exact open-path TSP", "approach": "Globally Optimal",
            "time_s": 342.0, "latency_ms": 70.0},
    "LIG": {"algorithm": "LIG", "approach": "Hybrid", "time_s": 355.0, "latency_ms": 4.0},
}
PAPER_GAP_CLOSURE = gap_closure(415.0, 355.0, 342.0)

CSV_COLUMNS = ("seed", "planner", "status", "mission_time_s", "path_length_m",
               "service_path_m", "mean_latency_ms", "median_latency_ms", "n_replans",
               "rois_serviced", "rois_total", "truncated_solves")


@dataclass
class BenchRow:
    seed: int
    planner: str
    status: str
    mission_time_s: Optional[float] = None
    path_length_m: Optional[float] = None
    service_path_m: Optional[float] = None
    mean_latency_ms: Optional[float] = None
    median_latency_ms: Optional[float] = None
    n_replans: int = 0
    rois_serviced: int = 0
    rois_total: int = 0
    truncated_solves: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class BenchmarkReport:
    rows: list[BenchRow]
    aggregates: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def all_complete(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "schema_version": "1.0",
            "units": {"time": "s", "length": "m", "latency": "ms"},
            "config": self.config,
            "environment": self.environment,
            "aggregates": self.aggregates,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(["" if getattr(r, c) is None else getattr(r, c) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_table(self) -> str:
        """Aligned summary laid out like the published planner table."""
        agg = self.aggregates["planners"]
        header = ("Algorithm", "Approach", "Time (s)", "Mean latency (ms)",
                  "Median latency (ms)", "Paper time (s)", "Paper latency (ms)", "ok")
        lines = []
        for name, a in agg.items():
            paper = PAPER_TABLE4.get(name, {})
            lines.append((
                paper.get("algorithm", name), paper.get("approach", ""),
                _num(a["mean_time_s"], 1), _num(a["mean_latency_ms"], 3),
                _num(a["median_latency_ms"], 3), _num(paper.get("time_s"), 0),
                _num(paper.get("latency_ms"), 0), f"{a['n_ok']}/{a['n_rows']}",
            ))
        widths = [max(len(str(x)) for x in col) for col in zip(header, *lines)]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        out = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
        out += [fmt.format(*line) for line in lines]
        gc = self.aggregates["gap_closure"]
        out.append("")
        out.append(f"gap closure: mean {_num(gc['mean'], 3)} over {gc['n_defined']} seeds "
                   f"with a defined gap; of mean times {_num(gc['of_means'], 3)}; "
                   f"paper values give {PAPER_GAP_CLOSURE:.3f}")
        return "\n".join(out) + "\n"

    def write(self, out_dir, plot: bool = True) -> dict[str, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {
            "csv": out_dir / "report.csv",
            "table": out_dir / "report.txt",
            "json": out_dir / "report.json",
        }
        paths["csv"].write_text(self.to_csv())
        paths["table"].write_text(self.to_table())
        paths["json"].write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        if plot:
            from .plotting import plot_bench
            paths["svg"] = plot_bench(self, out_dir / "report.svg")
        return paths


def _num(v, digits: int) -> str:
    return "-" if v is None else f"{v:.{digits}f}"


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return statistics.fmean(xs) if xs else None


def _median(xs):
    xs = [x for x in xs if x is not None]
    return statistics.median(xs) if xs else None


def aggregate(rows: Sequence[BenchRow], planners: Sequence[str]) -> dict:
    """Per-planner means and per-seed gap closure, recomputable from ``rows``."""
    per = {}
    for name in planners:
        rs = [r for r in rows if r.planner == name]
        ok = [r for r in rs if r.ok]
        per[name] = {
            "n_rows": len(rs),
            "n_ok": len(ok),
            "mean_time_s": _mean(r.mission_time_s for r in ok),
            "mean_path_m": _mean(r.path_length_m for r in ok),
            "mean_latency_ms": _mean(r.mean_latency_ms for r in rs),
            "median_latency_ms": _median(r.median_latency_ms for r in rs),
            "paper_time_s": PAPER_TABLE4.get(name, {}).get("time_s"),
            "paper_latency_ms": PAPER_TABLE4.get(name, {}).get("latency_ms"),
        }

    by_seed: dict[int, dict[str, BenchRow]] = {}
    for r in rows:
        by_seed.setdefault(r.seed, {})[r.planner] = r
    per_seed = {}
    for seed, rs in sorted(by_seed.items()):
        if not all(p in rs and rs[p].ok for p in ("NNH", "LIG", "OPT")):
            continue
        t_nnh, t_lig, t_opt = (rs[p].mission_time_s for p in ("NNH", "LIG", "OPT"))
        if None in (t_nnh, t_lig, t_opt) or t_nnh < t_opt:
            per_seed[seed] = None
        else:
            per_seed[seed] = gap_closure(t_nnh, t_lig, t_opt)
    defined = [g for g in per_seed.values() if g is not None]
    means = [per.get(p, {}).get("mean_time_s") for p in ("NNH", "LIG", "OPT")]
    of_means = None
    if all(m is not None for m in means) and means[0] > means[2]:
        of_means = gap_closure(*means)
    return {
        "planners": per,
        "gap_closure": {
            "per_seed": {str(k): v for k, v in per_seed.items()},
            "n_defined": len(defined),
            "mean": statistics.fmean(defined) if defined else None,
            "median": statistics.median(defined) if defined else None,
            "of_means": of_means,
            "paper_point_value": PAPER_GAP_CLOSURE,
        },
    }


def environment() -> dict:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor() or "unknown",
        "python": platform.python_version(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "latency_note": "wall-clock latencies measured on this host; the published "
                        "figures come from unspecified hardware",
    }


def trace_filename(seed: int, planner: str) -> str:
    return f"trace_seed{seed:04d}_{planner}.csv"


def bench(n_seeds: int = 50, n_rois: int = 25, fence: Optional[Geofence] = None,
          planners: Sequence[str] = PLANNER_NAMES, cfg: Optional[PlannerConfig] = None,
          *, base_seed: int = 0, delta: float = 50.0, sensor_radius: Optional[float] = None,
          speed: float = 5.0, dt: float = 0.1, reveal_all: bool = False,
          trace_dir=None, on_mission: Optional[Callable] = None) -> BenchmarkReport:
    """Run every planner on ``n_seeds`` seeded scenarios.

    Scenario seeds are ``base_seed .. base_seed + n_seeds - 1``. With
    ``reveal_all`` the sensor radius covers the whole fence, so every ROI is
    pending from the first step (the static 25-waypoint reading).
    A mission that raises is recorded as an error row; the sweep continues.
    ``on_mission(scenario, metrics, trace)`` is called after every mission so
    callers can inspect traces without the report holding on to them.
    """
    from .formats import save_trace

    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    fence = fence or table4_fence()
    planners = [p.upper() for p in planners]
    for p in planners:
        if p not in PLANNER_NAMES:
            raise ValueError(f"unknown planner {p!r}")
    cfg = cfg or PlannerConfig(speed=speed)
    if reveal_all:
        xmin, ymin, xmax, ymax = fence.bounds()
        sensor_radius = math.hypot(xmax - xmin, ymax - ymin)
    if trace_dir is not None:
        trace_dir = Path(trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for seed in range(base_seed, base_seed + n_seeds):
        scenario = generate_scenario(seed, n_rois, fence, delta=delta,
                                     sensor_radius=sensor_radius, speed=speed, dt=dt)
        for name in planners:
            try:
                metrics, trace = run_mission(scenario, name, cfg)
            except Exception as e:  # keep the sweep going
                rows.append(BenchRow(seed, name, f"error: {type(e).__name__}: {e}",
                                     rois_total=n_rois))
                continue
            if on_mission is not None:
                on_mission(scenario, metrics, trace)
            if trace_dir is not None:
                save_trace(trace, trace_dir / trace_filename(seed, name))
            lat = metrics.replan_latencies
            rows.append(BenchRow(
                seed=seed, planner=name,
                status="ok" if metrics.complete else "incomplete",
                mission_time_s=metrics.time_all_serviced,
                path_length_m=metrics.total_path_length,
                service_path_m=metrics.service_path_length,
                mean_latency_ms=1e3 * statistics.fmean(lat) if lat else None,
                median_latency_ms=1e3 * statistics.median(lat) if lat else None,
                n_replans=len(lat),
                rois_serviced=metrics.rois_serviced,
                rois_total=metrics.rois_total,
                truncated_solves=metrics.truncated_solves,
            ))
    rows.sort(key=lambda r: (r.seed, r.planner))
    config = {
        "n_seeds": n_seeds, "base_seed": base_seed, "n_rois": n_rois,
        "fence": [[p.x, p.y] for p in fence.vertices], "delta": delta,
        "sensor_radius": sensor_radius if sensor_radius is not None else delta / 2,
        "speed": speed, "dt": dt, "reveal_all": reveal_all, "planners": planners,
        "k_batch": cfg.k_batch, "batch_order": cfg.batch_order.value,
        "accept_radius": cfg.accept_radius,
        "sweep_accept_radius": cfg.sweep_accept_radius, "resume": cfg.resume.value,
        "exact_budget_s": cfg.exact_budget,
    }
    return BenchmarkReport(rows, aggregate(rows, planners), environment(), config)
