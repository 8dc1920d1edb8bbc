"""Online SWEEP/SERVICE planners: LIG plus the NNH and optimal-replan baselines.

All three share one state machine. In SWEEP the UAV follows the lawn-mower
waypoints; as soon as anything is pending it switches to SERVICE and works
through a batch of pending ROIs. The planners differ only in how a batch is
chosen and when it is thrown away:

* LIG: the ``k_batch`` nearest pending ROIs, ordered within the batch; the
  batch runs to completion even if new ROIs are detected meanwhile.
* NNH: the single nearest pending ROI, re-chosen after every detection.
* OPT: an exact open path over all pending ROIs, re-solved whenever the
  pending set changes.

With ``Resume.REJOIN`` (the default) the UAV flies back to the spot where it
left the sweep before heading on to ``LM[i]``; flying straight to ``LM[i]``
from a diversion leaves an unswept wedge next to the track.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .coverage import CoveragePlan
from .geometry import Geofence, Point2D, distance, project_into
from .routing import DEFAULT_BUDGET, Optimality, exact_path, path_length

EXACT_K_MAX = 5


class Mode(str, enum.Enum):
    SWEEP = "SWEEP"
    SERVICE = "SERVICE"


class BatchOrder(str, enum.Enum):
    LITERAL_NN = "literal-nn"
    EXACT_K = "exact-k"


class Resume(str, enum.Enum):
    REJOIN = "rejoin"  # back to the point where the sweep was left, then LM[i]
    GRID = "grid"  # straight to LM[i]


class RoiState(str, enum.Enum):
    HIDDEN = "hidden"
    DETECTED = "detected"
    SERVICED = "serviced"


@dataclass
class Roi:
    id: int
    position: Point2D
    appear_time: float = 0.0
    state: RoiState = RoiState.HIDDEN
    detect_time: Optional[float] = None
    service_time: Optional[float] = None

    def mark_detected(self, t: float) -> None:
        if self.state is not RoiState.HIDDEN:
            raise ValueError(f"ROI {self.id} is already {self.state.value}")
        self.state = RoiState.DETECTED
        self.detect_time = t

    def mark_serviced(self, t: float) -> None:
        if self.state is not RoiState.DETECTED:
            raise ValueError(f"ROI {self.id} cannot be serviced from state {self.state.value}")
        self.state = RoiState.SERVICED
        self.service_time = t


@dataclass(frozen=True)
class PlannerConfig:
    k_batch: int = 3
    batch_order: BatchOrder = BatchOrder.EXACT_K
    accept_radius: float = 1.0
    # sweep waypoints need exact arrival: a sensor of radius delta/2 has no
    # margin, so cutting corners by accept_radius leaves slivers unswept
    sweep_accept_radius: float = 0.0
    delta: Optional[float] = None  # None: take the scenario's track spacing
    speed: float = 5.0
    exact_budget: float = DEFAULT_BUDGET
    resume: Resume = Resume.REJOIN

    def __post_init__(self) -> None:
        object.__setattr__(self, "batch_order", BatchOrder(self.batch_order))
        object.__setattr__(self, "resume", Resume(self.resume))
        if self.k_batch < 1:
            raise ValueError("k_batch must be >= 1")
        if not self.accept_radius > 0:
            raise ValueError("accept_radius must be positive")
        if self.sweep_accept_radius < 0:
            raise ValueError("sweep_accept_radius must be non-negative")
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if self.batch_order is BatchOrder.EXACT_K and self.k_batch > EXACT_K_MAX:
            raise ValueError(f"exact-k ordering supports k_batch <= {EXACT_K_MAX}")


@dataclass
class PlannerState:
    mode: Mode = Mode.SWEEP
    pending: dict[int, Roi] = field(default_factory=dict)
    serviced: set[int] = field(default_factory=set)
    grid_index: int = 0
    batch: list[int] = field(default_factory=list)
    current_target: Optional[Point2D] = None
    rejoin: Optional[Point2D] = None
    # bookkeeping for the most recent step only
    events: list[str] = field(default_factory=list)
    just_serviced: list[int] = field(default_factory=list)
    changed: bool = False
    truncated_solves: int = 0
    complete: bool = False


def merge_detections(state: PlannerState, detections: Iterable[Roi]) -> PlannerState:
    """Append ROIs that are neither pending nor already serviced."""
    for roi in detections:
        if roi.id in state.pending or roi.id in state.serviced:
            continue
        state.pending[roi.id] = roi
        state.events.append(f"detect:{roi.id}")
        state.changed = True
    return state


def mode_transition(state: PlannerState) -> Mode:
    return Mode.SERVICE if state.pending else Mode.SWEEP


def select_batch(pending: Iterable[Roi], q: Point2D, k: int) -> list[Roi]:
    """The ``min(k, len(pending))`` ROIs nearest to ``q``; ties by lower id."""
    ranked = sorted(pending, key=lambda r: (distance(q, r.position), r.id))
    if not ranked:
        raise ValueError("cannot select a batch from an empty pending set")
    return ranked[:k]


def order_batch(batch: Sequence[Roi], q: Point2D,
                mode: BatchOrder = BatchOrder.EXACT_K) -> list[Roi]:
    if not batch:
        raise ValueError("batch must be non-empty")
    mode = BatchOrder(mode)
    if mode is BatchOrder.LITERAL_NN:
        remaining = list(batch)
        out = []
        cur = q
        while remaining:
            nxt = min(remaining, key=lambda r: distance(cur, r.position))
            remaining.remove(nxt)
            out.append(nxt)
            cur = nxt.position
        return out
    if len(batch) > EXACT_K_MAX:
        raise ValueError(f"exact-k ordering supports at most {EXACT_K_MAX} ROIs, got {len(batch)}")
    points = [r.position for r in batch]
    best, best_len = None, None
    for perm in itertools.permutations(range(len(batch))):
        length = path_length(q, points, perm)
        if best_len is None or length < best_len:
            best, best_len = perm, length
    return [batch[i] for i in best]


@dataclass(frozen=True)
class _Policy:
    choose: Callable[[PlannerState, Point2D, PlannerConfig], list[int]]
    reselect_on_detection: bool
    reselect_on_service: bool


def _choose_lig(state: PlannerState, q: Point2D, cfg: PlannerConfig) -> list[int]:
    batch = select_batch(state.pending.values(), q, cfg.k_batch)
    return [r.id for r in order_batch(batch, q, cfg.batch_order)]


def _choose_nnh(state: PlannerState, q: Point2D, cfg: PlannerConfig) -> list[int]:
    return [select_batch(state.pending.values(), q, 1)[0].id]


def _choose_optimal(state: PlannerState, q: Point2D, cfg: PlannerConfig) -> list[int]:
    rois = list(state.pending.values())
    route = exact_path(q, [r.position for r in rois], cfg.exact_budget)
    if route.optimality is Optimality.BUDGET_TRUNCATED:
        state.truncated_solves += 1
    return [rois[i].id for i in route.order]


LIG = _Policy(_choose_lig, reselect_on_detection=False, reselect_on_service=False)
NNH = _Policy(_choose_nnh, reselect_on_detection=True, reselect_on_service=True)
OPTIMAL = _Policy(_choose_optimal, reselect_on_detection=True, reselect_on_service=True)

POLICIES = {"LIG": LIG, "NNH": NNH, "OPT": OPTIMAL}


def _step(policy: _Policy, state: PlannerState, q: Point2D, detections: Iterable[Roi],
          plan: CoveragePlan, fence: Geofence,
          cfg: PlannerConfig) -> tuple[PlannerState, Optional[Point2D]]:
    state.events = []
    state.just_serviced = []
    state.changed = False
    merge_detections(state, detections)
    if state.changed and policy.reselect_on_detection:
        state.batch = []

    target: Optional[Point2D] = None
    while True:
        mode = mode_transition(state)
        if mode is not state.mode:
            state.events.append(f"mode:{mode.value}")
            if (mode is Mode.SERVICE and cfg.resume is Resume.REJOIN
                    and state.rejoin is None and state.grid_index < len(plan.waypoints)):
                state.rejoin = q
            state.mode = mode
            state.changed = True
        if mode is Mode.SERVICE:
            if not state.batch:
                state.batch = policy.choose(state, q, cfg)
                state.events.append("batch:" + ",".join(str(i) for i in state.batch))
            head = state.pending[state.batch[0]]
            if distance(q, head.position) <= cfg.accept_radius:
                state.batch.pop(0)
                del state.pending[head.id]
                state.serviced.add(head.id)
                state.just_serviced.append(head.id)
                state.events.append(f"service:{head.id}")
                state.changed = True
                if policy.reselect_on_service:
                    state.batch = []
                continue
            target = head.position
        else:
            state.batch = []
            reach = cfg.sweep_accept_radius + 1e-9
            if state.rejoin is not None:
                if distance(q, state.rejoin) <= reach:
                    state.rejoin = None
                    state.events.append("rejoin")
                    continue
                target = state.rejoin
            elif state.grid_index >= len(plan.waypoints):
                state.complete = True
                target = None
            elif distance(q, plan.waypoints[state.grid_index]) <= reach:
                state.grid_index += 1
                continue
            else:
                target = plan.waypoints[state.grid_index]
        break

    if target is not None:
        target = project_into(fence, target)
    state.current_target = target
    return state, target


def lig_step(state: PlannerState, q: Point2D, detections: Iterable[Roi], plan: CoveragePlan,
             fence: Geofence, cfg: PlannerConfig) -> tuple[PlannerState, Optional[Point2D]]:
    """One pass of the LIG loop body.

    ``state`` is updated in place and returned together with the next
    waypoint, or ``None`` once the grid is exhausted with nothing pending.
    """
    return _step(LIG, state, q, detections, plan, fence, cfg)


def nnh_step(state: PlannerState, q: Point2D, detections: Iterable[Roi], plan: CoveragePlan,
             fence: Geofence, cfg: PlannerConfig) -> tuple[PlannerState, Optional[Point2D]]:
    return _step(NNH, state, q, detections, plan, fence, cfg)


def optimal_step(state: PlannerState, q: Point2D, detections: Iterable[Roi], plan: CoveragePlan,
                 fence: Geofence, cfg: PlannerConfig) -> tuple[PlannerState, Optional[Point2D]]:
    return _step(OPTIMAL, state, q, detections, plan, fence, cfg)


STEP_FUNCTIONS = {"LIG": lig_step, "NNH": nnh_step, "OPT": optimal_step}
PLANNER_NAMES = tuple(STEP_FUNCTIONS)
