"""Fixed-step kinematic mission simulator with the planner in the loop."""

from __future__ import annotations

import math
import random
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

from .coverage import DEFAULT_DELTA, CoveragePlan, lawn_mower_grid
from .geometry import Geofence, Point2D, contains, distance
from .planners import (
    STEP_FUNCTIONS,
    Mode,
    PlannerConfig,
    PlannerState,
    Roi,
    RoiState,
)

DEFAULT_DT = 0.1
DEFAULT_SPEED = 5.0
TIME_CAP = 4 * 3600.0


@dataclass(frozen=True)
class Scenario:
    fence: Geofence
    rois: tuple[Roi, ...] = ()
    delta: float = DEFAULT_DELTA
    sensor_radius: Optional[float] = None  # None: delta / 2
    speed: float = DEFAULT_SPEED
    start: Optional[Point2D] = None  # None: first sweep waypoint
    dt: float = DEFAULT_DT
    rng_seed: int = 0
    orientation: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rois", tuple(self.rois))
        if self.sensor_radius is None:
            object.__setattr__(self, "sensor_radius", self.delta / 2)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if self.sensor_radius < 0:
            raise ValueError("sensor_radius must be non-negative")
        ids = [r.id for r in self.rois]
        if len(set(ids)) != len(ids):
            raise ValueError("ROI ids must be unique")
        for r in self.rois:
            if r.appear_time < 0:
                raise ValueError(f"ROI {r.id} has negative appear_time")
            if not contains(self.fence, r.position):
                raise ValueError(f"ROI {r.id} at ({r.position.x}, {r.position.y}) is outside the fence")
        if self.start is not None and not contains(self.fence, self.start):
            raise ValueError("start position is outside the fence")

    def coverage_plan(self) -> CoveragePlan:
        return lawn_mower_grid(self.fence, self.delta, self.orientation)

    def start_position(self) -> Point2D:
        return self.start if self.start is not None else self.coverage_plan().waypoints[0]


@dataclass
class MissionMetrics:
    planner: str
    complete: bool
    time_all_serviced: Optional[float]
    total_path_length: float
    service_path_length: float
    path_at_last_service: float
    replan_latencies: list[float]
    rois_serviced: int
    rois_total: int
    truncated_solves: int = 0
    mission_time: float = 0.0
    gap_closure: Optional[float] = None

    @property
    def mean_replan_latency(self) -> float:
        return statistics.fmean(self.replan_latencies) if self.replan_latencies else 0.0

    @property
    def median_replan_latency(self) -> float:
        return statistics.median(self.replan_latencies) if self.replan_latencies else 0.0


class TraceRow(NamedTuple):
    step: int
    t: float
    x: float
    y: float
    mode: str
    pending: int
    grid_index: int
    target_x: Optional[float]
    target_y: Optional[float]
    events: str


@dataclass
class Trace:
    rows: list[TraceRow] = field(default_factory=list)
    rois: list[Roi] = field(default_factory=list)  # final lifecycle states

    def __len__(self) -> int:
        return len(self.rows)

    def positions(self) -> list[Point2D]:
        return [Point2D(r.x, r.y) for r in self.rows]


def sense(q: Point2D, t: float, rois: Sequence[Roi], sensor_radius: float) -> list[Roi]:
    """Detect hidden, already-present ROIs within the sensor disc around ``q``."""
    if sensor_radius < 0:
        raise ValueError("sensor_radius must be non-negative")
    found = []
    for roi in rois:
        if roi.state is not RoiState.HIDDEN or roi.appear_time > t:
            continue
        if math.hypot(roi.position.x - q.x, roi.position.y - q.y) <= sensor_radius:
            roi.mark_detected(t)
            found.append(roi)
    return found


def advance(q: Point2D, target: Point2D, speed: float, dt: float) -> Point2D:
    """Straight-line move towards ``target`` by at most ``speed * dt``; never overshoots."""
    if not (speed > 0 and dt > 0):
        raise ValueError("speed and dt must be positive")
    d = distance(q, target)
    step = speed * dt
    if d <= step:
        return target
    f = step / d
    return Point2D(q.x + f * (target.x - q.x), q.y + f * (target.y - q.y))


def run_mission(scenario: Scenario, planner: str = "LIG",
                cfg: PlannerConfig | None = None,
                time_cap: float = TIME_CAP) -> tuple[MissionMetrics, Trace]:
    """Fly one mission: sense, plan, move, record, until complete or capped.

    Replan latency is the wall-clock time of each planner call that changed
    the pending set or the mode; it is the only non-deterministic output.
    """
    planner = planner.upper()
    step_fn = STEP_FUNCTIONS[planner]
    cfg = cfg or PlannerConfig(speed=scenario.speed)
    speed = scenario.speed
    delta = cfg.delta if cfg.delta is not None else scenario.delta
    plan = lawn_mower_grid(scenario.fence, delta, scenario.orientation)
    fence = scenario.fence
    dt = scenario.dt

    rois = [replace(r, state=RoiState.HIDDEN, detect_time=None, service_time=None)
            for r in scenario.rois]
    hidden = list(rois)
    by_id = {r.id: r for r in rois}
    state = PlannerState()
    trace = Trace(rois=rois)
    latencies: list[float] = []
    q = scenario.start if scenario.start is not None else plan.waypoints[0]
    flown = 0.0
    service_len = 0.0
    last_service_len = 0.0
    last_service_t: Optional[float] = None
    n_serviced = 0
    k = 0
    complete = False
    clock = time.perf_counter

    while True:
        t = k * dt
        detections = sense(q, t, hidden, scenario.sensor_radius) if hidden else []
        if detections:
            hidden = [r for r in hidden if r.state is RoiState.HIDDEN]
        t0 = clock()
        state, waypoint = step_fn(state, q, detections, plan, fence, cfg)
        elapsed = clock() - t0
        if state.changed:
            latencies.append(elapsed)
        for rid in state.just_serviced:
            by_id[rid].mark_serviced(t)
            n_serviced += 1
            last_service_t = t
            last_service_len = flown
        trace.rows.append(TraceRow(
            k, t, q.x, q.y, state.mode.value, len(state.pending), state.grid_index,
            waypoint.x if waypoint is not None else None,
            waypoint.y if waypoint is not None else None,
            ";".join(state.events),
        ))
        if waypoint is None:
            complete = True
            break
        if t >= time_cap:
            break
        q_next = advance(q, waypoint, speed, dt)
        leg = distance(q, q_next)
        flown += leg
        if state.mode is Mode.SERVICE:
            service_len += leg
        q = q_next
        k += 1

    all_serviced = n_serviced == len(rois)
    metrics = MissionMetrics(
        planner=planner,
        complete=complete and all_serviced,
        time_all_serviced=(last_service_t if rois else None) if all_serviced else None,
        total_path_length=flown,
        service_path_length=service_len,
        path_at_last_service=last_service_len,
        replan_latencies=latencies,
        rois_serviced=n_serviced,
        rois_total=len(rois),
        truncated_solves=state.truncated_solves,
        mission_time=k * dt,
    )
    return metrics, trace


def gap_closure(t_nnh: float, t_lig: float, t_opt: float) -> Optional[float]:
    """Share of the NNH-to-optimal gap recovered: (t_nnh - t_lig) / (t_nnh - t_opt)."""
    denom = t_nnh - t_opt
    if denom == 0:
        return None
    if denom < 0:
        raise ValueError("t_nnh must not be below t_opt")
    return (t_nnh - t_lig) / denom


def generate_scenario(seed: int, n_rois: int, fence: Geofence, *,
                      delta: float = DEFAULT_DELTA, sensor_radius: Optional[float] = None,
                      speed: float = DEFAULT_SPEED, dt: float = DEFAULT_DT,
                      start: Optional[Point2D] = None, appear_time: float = 0.0,
                      orientation: float = 0.0) -> Scenario:
    """Seeded scenario with ``n_rois`` ROIs uniform over the fence interior.

    Positions come from rejection sampling in the fence bounding box, so they
    are uniform over any convex fence.
    """
    if n_rois < 0:
        raise ValueError("n_rois must be non-negative")
    rng = random.Random(seed)
    xmin, ymin, xmax, ymax = fence.bounds()
    rois = []
    while len(rois) < n_rois:
        p = Point2D(rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
        if contains(fence, p) and all(distance(p, r.position) > 1e-9 for r in rois):
            rois.append(Roi(len(rois), p, appear_time))
    if start is None:
        start = lawn_mower_grid(fence, delta, orientation).waypoints[0]
    return Scenario(fence=fence, rois=tuple(rois), delta=delta, sensor_radius=sensor_radius,
                    speed=speed, start=start, dt=dt, rng_seed=seed, orientation=orientation)


def table4_fence() -> Geofence:
    """The 600 m x 400 m search box."""
    return Geofence.rectangle(0.0, 0.0, 600.0, 400.0)
