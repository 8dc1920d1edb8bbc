"""Command-line entry point: ``sarplan {generate,run,bench,plot}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .coverage import DEFAULT_DELTA
from .geometry import Geofence
from .planners import PLANNER_NAMES, BatchOrder, PlannerConfig, Resume
from .routing import DEFAULT_BUDGET
from .simulator import DEFAULT_DT, DEFAULT_SPEED

OUT_ENV = "SARPLAN_OUT"
log = logging.getLogger("sarplan")


def _default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "sarplan-out"))


def _add_planner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-batch", type=int, default=3, help="ROIs per LIG batch (K)")
    p.add_argument("--batch-order", choices=[b.value for b in BatchOrder],
                   default=BatchOrder.EXACT_K.value, help="ordering inside a LIG batch")
    p.add_argument("--accept-radius", type=float, default=1.0,
                   help="waypoint/ROI arrival radius (m)")
    p.add_argument("--sweep-accept-radius", type=float, default=0.0,
                   help="arrival radius for sweep waypoints (m)")
    p.add_argument("--resume", choices=[r.value for r in Resume], default=Resume.REJOIN.value,
                   help="how the sweep is resumed after servicing")
    p.add_argument("--budget", type=float, default=DEFAULT_BUDGET,
                   help="exact solver time budget per solve (s)")


def _add_box_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width", type=float, default=600.0, help="search box East extent (m)")
    p.add_argument("--height", type=float, default=400.0, help="search box North extent (m)")
    p.add_argument("--n-rois", type=int, default=25, help="number of ROIs")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="track spacing (m)")
    p.add_argument("--sensor-radius", type=float, default=None,
                   help="detection radius (m); default delta/2")
    p.add_argument("--speed", type=float, default=DEFAULT_SPEED, help="cruise speed (m/s)")
    p.add_argument("--dt", type=float, default=DEFAULT_DT, help="simulation step (s)")


def _planner_config(args, speed: float) -> PlannerConfig:
    return PlannerConfig(k_batch=args.k_batch, batch_order=args.batch_order,
                         accept_radius=args.accept_radius,
                         sweep_accept_radius=args.sweep_accept_radius, speed=speed,
                         exact_budget=args.budget, resume=args.resume)


def cmd_generate(args) -> int:
    from .formats import save_scenario
    from .simulator import generate_scenario

    fence = Geofence.rectangle(0.0, 0.0, args.width, args.height)
    sc = generate_scenario(args.seed, args.n_rois, fence, delta=args.delta,
                           sensor_radius=args.sensor_radius, speed=args.speed, dt=args.dt,
                           appear_time=args.appear_time)
    save_scenario(sc, args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_run(args) -> int:
    from .formats import load_scenario, save_trace
    from .plotting import plot_trace
    from .simulator import run_mission

    sc = load_scenario(args.scenario)
    metrics, trace = run_mission(sc, args.planner, _planner_config(args, sc.speed))
    summary = {
        "planner": metrics.planner,
        "complete": metrics.complete,
        "time_all_serviced_s": metrics.time_all_serviced,
        "mission_time_s": metrics.mission_time,
        "total_path_length_m": metrics.total_path_length,
        "service_path_length_m": metrics.service_path_length,
        "rois_serviced": metrics.rois_serviced,
        "rois_total": metrics.rois_total,
        "mean_replan_latency_ms": 1e3 * metrics.mean_replan_latency,
        "median_replan_latency_ms": 1e3 * metrics.median_replan_latency,
        "truncated_solves": metrics.truncated_solves,
    }
    print(json.dumps(summary, indent=2))
    if args.trace:
        save_trace(trace, args.trace)
    if args.metrics:
        Path(args.metrics).write_text(json.dumps(summary, indent=2) + "\n")
    if args.plot:
        plot_trace(trace, sc, args.plot)
    return 0 if metrics.complete else 1


def cmd_bench(args) -> int:
    from .bench import bench

    out = Path(args.out) if args.out else _default_out()
    fence = Geofence.rectangle(0.0, 0.0, args.width, args.height)
    planners = [p.strip().upper() for p in args.planners.split(",") if p.strip()]
    report = bench(args.seeds, args.n_rois, fence, planners, _planner_config(args, args.speed),
                   base_seed=args.seed, delta=args.delta, sensor_radius=args.sensor_radius,
                   speed=args.speed, dt=args.dt, reveal_all=args.static,
                   trace_dir=out / "traces" if args.traces else None)
    paths = report.write(out, plot=not args.no_plot)
    print(report.to_table(), end="")
    for kind, p in paths.items():
        log.info("wrote %s report to %s", kind, p)
    return 0 if report.all_complete else 1


def cmd_plot(args) -> int:
    from .formats import load_scenario, load_trace
    from .plotting import plot_trace

    plot_trace(load_trace(args.trace), load_scenario(args.scenario), args.output)
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="sarplan", formatter_class=fmt,
                                     description="Search-and-rescue UAV route planning simulator.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded scenario JSON", formatter_class=fmt)
    g.add_argument("--seed", type=int, default=0, help="scenario seed")
    _add_box_flags(g)
    g.add_argument("--appear-time", type=float, default=0.0, help="ROI appearance time (s)")
    g.add_argument("-o", "--output", default="scenario.json", help="output JSON path")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="fly one mission with one planner", formatter_class=fmt)
    r.add_argument("scenario", help="scenario JSON")
    r.add_argument("--planner", choices=PLANNER_NAMES, default="LIG", type=str.upper)
    _add_planner_flags(r)
    r.add_argument("--trace", help="write trace CSV here")
    r.add_argument("--metrics", help="write metrics JSON here")
    r.add_argument("--plot", help="write SVG trace plot here")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="three-planner comparison", formatter_class=fmt)
    b.add_argument("--seeds", type=int, default=50, help="number of seeded scenarios")
    b.add_argument("--seed", type=int, default=0, help="first scenario seed")
    _add_box_flags(b)
    b.add_argument("--planners", default=",".join(PLANNER_NAMES), help="comma-separated")
    _add_planner_flags(b)
    b.add_argument("--static", action="store_true",
                   help="reveal every ROI at t=0 instead of detecting them during the sweep")
    b.add_argument("--out", default=None,
                   help=f"output directory (default: ${OUT_ENV} or ./sarplan-out)")
    b.add_argument("--traces", action="store_true", help="also write one trace CSV per mission")
    b.add_argument("--no-plot", action="store_true", help="skip the SVG summary figure")
    b.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", help="render a trace CSV to SVG", formatter_class=fmt)
    p.add_argument("scenario", help="scenario JSON")
    p.add_argument("trace", help="trace CSV")
    p.add_argument("-o", "--output", default="trace.svg", help="output SVG path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"sarplan: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
