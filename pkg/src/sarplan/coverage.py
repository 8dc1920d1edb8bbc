"""Boustrophedon (lawn-mower) sweep generation and raster coverage checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Geofence, Point2D, clip_path_to_fence

DEFAULT_DELTA = 50.0


@dataclass(frozen=True)
class CoveragePlan:
    waypoints: tuple[Point2D, ...]
    delta: float
    orientation: float = 0.0

    def __len__(self) -> int:
        return len(self.waypoints)

    def __getitem__(self, i: int) -> Point2D:
        return self.waypoints[i]

    @property
    def n_tracks(self) -> int:
        return len(self.waypoints) // 2


def _rotate(x: float, y: float, theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    return c * x - s * y, s * x + c * y


def track_offsets(lo: float, hi: float, delta: float) -> list[float]:
    """Cross-track positions of the sweep lines between ``lo`` and ``hi``.

    The first and last lines sit ``delta/2`` inside the extent and the others
    follow at ``delta`` increments. When the extent is not a whole multiple of
    ``delta`` the last line is pinned to the far inset, so its gap to the
    previous line is shorter than ``delta``.
    """
    first = lo + delta / 2
    last = hi - delta / 2
    span = last - first
    tol = 1e-9 * max(1.0, abs(hi - lo))
    if span < -tol:
        raise ValueError(
            f"fence extent {hi - lo:g} m is narrower than track spacing {delta:g} m"
        )
    if span <= tol:
        return [(lo + hi) / 2]
    n_gaps = math.ceil(span / delta - 1e-9)
    offsets = [first + k * delta for k in range(n_gaps)]
    offsets.append(last)
    return offsets


def _chord(fence: Geofence, theta: float, v: float) -> tuple[float, float]:
    """Along-track interval of the rotated fence at cross-track coordinate ``v``."""
    pts = [_rotate(p.x, p.y, -theta) for p in fence.vertices]
    us = []
    n = len(pts)
    for k in range(n):
        (u0, v0), (u1, v1) = pts[k], pts[(k + 1) % n]
        if v0 == v1:
            if abs(v - v0) <= 1e-9:
                us.extend([u0, u1])
            continue
        if min(v0, v1) - 1e-9 <= v <= max(v0, v1) + 1e-9:
            t = (v - v0) / (v1 - v0)
            t = min(1.0, max(0.0, t))
            us.append(u0 + t * (u1 - u0))
    return min(us), max(us)


def lawn_mower_grid(fence: Geofence, delta: float = DEFAULT_DELTA,
                    orientation: float = 0.0) -> CoveragePlan:
    """Alternating parallel tracks over ``fence`` spaced ``delta`` apart.

    Tracks run along the ``orientation`` direction and are ordered across the
    fence starting from its low cross-track side; the first track runs in the
    positive along-track direction.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    rotated = [_rotate(p.x, p.y, -orientation) for p in fence.vertices]
    vs = [v for _, v in rotated]
    offsets = track_offsets(min(vs), max(vs), delta)

    waypoints: list[Point2D] = []
    for k, v in enumerate(offsets):
        u0, u1 = _chord(fence, orientation, v)
        ends = [(u0, v), (u1, v)] if k % 2 == 0 else [(u1, v), (u0, v)]
        for u, vv in ends:
            x, y = _rotate(u, vv, orientation)
            waypoints.append(Point2D(x, y))
    waypoints = clip_path_to_fence(waypoints, fence)
    return CoveragePlan(tuple(waypoints), float(delta), float(orientation))


def raster_cells(fence: Geofence, cell: float) -> np.ndarray:
    """Centres of the ``cell``-sized raster cells whose centre lies in the fence."""
    if not cell > 0:
        raise ValueError("cell must be positive")
    xmin, ymin, xmax, ymax = fence.bounds()
    xs = xmin + (np.arange(math.ceil((xmax - xmin) / cell)) + 0.5) * cell
    ys = ymin + (np.arange(math.ceil((ymax - ymin) / cell)) + 0.5) * cell
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = np.ones(len(pts), dtype=bool)
    for a, b in fence.edges:
        cross = (b.x - a.x) * (pts[:, 1] - a.y) - (b.y - a.y) * (pts[:, 0] - a.x)
        inside &= cross >= 0
    return pts[inside]


def distance_to_polyline(pts: np.ndarray, polyline: list[Point2D]) -> np.ndarray:
    """Euclidean distance from each row of ``pts`` to the polyline."""
    best = np.full(len(pts), np.inf)
    if len(polyline) == 1:
        p = polyline[0]
        return np.hypot(pts[:, 0] - p.x, pts[:, 1] - p.y)
    for a, b in zip(polyline, polyline[1:]):
        dx, dy = b.x - a.x, b.y - a.y
        denom = dx * dx + dy * dy
        if denom == 0.0:
            t = np.zeros(len(pts))
        else:
            t = np.clip(((pts[:, 0] - a.x) * dx + (pts[:, 1] - a.y) * dy) / denom, 0.0, 1.0)
        d = np.hypot(pts[:, 0] - (a.x + t * dx), pts[:, 1] - (a.y + t * dy))
        np.minimum(best, d, out=best)
    return best


def coverage_fraction(plan: CoveragePlan, fence: Geofence, sensor_radius: float,
                      cell: float = 1.0) -> float:
    """Fraction of raster cell centres within ``sensor_radius`` of the sweep polyline."""
    pts = raster_cells(fence, cell)
    if len(pts) == 0:
        return 0.0
    d = distance_to_polyline(pts, list(plan.waypoints))
    return float(np.count_nonzero(d <= sensor_radius + 1e-9)) / len(pts)
