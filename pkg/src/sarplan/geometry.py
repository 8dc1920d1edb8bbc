"""Planar geometry in a local East-North frame (metres).

Only convex geofences are supported; that is what lets fence clipping work
pointwise, since a segment between two contained points is itself contained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_EPS = 0.01


@dataclass(frozen=True, slots=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def distance(a: Point2D, b: Point2D) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def _cross(o: Point2D, a: Point2D, b: Point2D) -> float:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


@dataclass(frozen=True)
class Geofence:
    """Strictly convex polygon with counter-clockwise vertices."""

    vertices: tuple[Point2D, ...]
    eps: float = DEFAULT_EPS

    def __post_init__(self) -> None:
        verts = tuple(v if isinstance(v, Point2D) else Point2D(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ValueError("geofence needs at least 3 vertices")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        for k in range(n):
            if _cross(verts[k], verts[(k + 1) % n], verts[(k + 2) % n]) <= 0:
                raise ValueError(
                    "geofence must be strictly convex and counter-clockwise "
                    f"(turn at vertex {(k + 1) % n} is not a left turn)"
                )
        if self.area <= 0:
            raise ValueError("geofence has zero area")

    @classmethod
    def rectangle(cls, xmin: float, ymin: float, xmax: float, ymax: float,
                  eps: float = DEFAULT_EPS) -> "Geofence":
        return cls(
            (Point2D(xmin, ymin), Point2D(xmax, ymin), Point2D(xmax, ymax), Point2D(xmin, ymax)),
            eps,
        )

    @property
    def area(self) -> float:
        v = self.vertices
        s = 0.0
        for k in range(len(v)):
            a, b = v[k], v[(k + 1) % len(v)]
            s += a.x * b.y - b.x * a.y
        return 0.5 * s

    @property
    def edges(self) -> list[tuple[Point2D, Point2D]]:
        v = self.vertices
        return [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def contains(fence: Geofence, p: Point2D) -> bool:
    """Half-plane test against every edge, with ``fence.eps`` slack."""
    for a, b in fence.edges:
        # signed distance of p to the left of edge a->b
        cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
        if cross < -fence.eps * math.hypot(b.x - a.x, b.y - a.y):
            return False
    return True


def closest_point_on_segment(p: Point2D, a: Point2D, b: Point2D) -> Point2D:
    dx, dy = b.x - a.x, b.y - a.y
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return a
    t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / denom
    t = min(1.0, max(0.0, t))
    return Point2D(a.x + t * dx, a.y + t * dy)


def project_into(fence: Geofence, p: Point2D) -> Point2D:
    """Return ``p`` if it is inside the fence, else the nearest boundary point."""
    if contains(fence, p):
        return p
    best = None
    best_d = math.inf
    for a, b in fence.edges:
        c = closest_point_on_segment(p, a, b)
        d = distance(p, c)
        if d < best_d:
            best, best_d = c, d
    return best


def clip_path_to_fence(path: Sequence[Point2D], fence: Geofence) -> list[Point2D]:
    """Replace every out-of-fence waypoint by its projection onto the fence.

    Waypoint count and order are preserved. With a convex fence every segment
    between consecutive output waypoints is then contained as well.
    """
    if not path:
        raise ValueError("path must be non-empty")
    return [project_into(fence, p) for p in path]


def segment_inside(fence: Geofence, a: Point2D, b: Point2D, samples: int = 100) -> bool:
    """Sampled segment containment check, used to assert the convexity argument."""
    for k in range(samples + 1):
        t = k / samples
        if not contains(fence, Point2D(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))):
            return False
    return True


def polyline_length(points: Iterable[Point2D]) -> float:
    total = 0.0
    prev = None
    for p in points:
        if prev is not None:
            total += distance(prev, p)
        prev = p
    return total
