"""Open-path tour construction from a fixed start.

No return leg is ever added: a route starts at the UAV position and ends at
its last target. Ties are broken towards lower target indices so that every
solver is deterministic.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Point2D, distance

HELD_KARP_MAX = 15
BRUTE_FORCE_MAX = 9
DEFAULT_BUDGET = 1.0


class Optimality(str, enum.Enum):
    HEURISTIC = "heuristic"
    PROVEN_OPTIMAL = "proven-optimal"
    BUDGET_TRUNCATED = "budget-truncated"


@dataclass(frozen=True)
class RouteProblem:
    start: Point2D
    targets: tuple[Point2D, ...]
    return_to_start: bool = False

    def __post_init__(self) -> None:
        if self.return_to_start:
            raise ValueError("closed tours are not supported")
        for i, j in itertools.combinations(range(len(self.targets)), 2):
            if distance(self.targets[i], self.targets[j]) <= 1e-9:
                raise ValueError(f"targets {i} and {j} coincide")


@dataclass(frozen=True)
class Route:
    order: tuple[int, ...]
    length: float
    solver_latency: float = 0.0
    optimality: Optimality = Optimality.HEURISTIC


def _check_permutation(order: Sequence[int], n: int) -> None:
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {list(order)} is not a permutation of range({n})")


def path_length(start: Point2D, targets: Sequence[Point2D], order: Sequence[int]) -> float:
    """Sum of legs start -> targets[order[0]] -> ... -> targets[order[-1]]."""
    _check_permutation(order, len(targets))
    total = 0.0
    cur = start
    for k in order:
        nxt = targets[k]
        total += distance(cur, nxt)
        cur = nxt
    return total


def distance_matrix(start: Point2D, targets: Sequence[Point2D]) -> list[list[float]]:
    """Row/column 0 is the start; target ``k`` is node ``k + 1``."""
    nodes = [start, *targets]
    return [[distance(a, b) for b in nodes] for a in nodes]


def _nn_order(dist: list[list[float]], n: int) -> list[int]:
    unvisited = list(range(1, n + 1))
    cur = 0
    order = []
    while unvisited:
        # unvisited stays sorted, so min() keeps the lowest index on ties
        nxt = min(unvisited, key=lambda j: dist[cur][j])
        unvisited.remove(nxt)
        order.append(nxt - 1)
        cur = nxt
    return order


def nn_path(start: Point2D, targets: Sequence[Point2D]) -> Route:
    """Greedy chain: always fly to the nearest unvisited target."""
    t0 = time.perf_counter()
    dist = distance_matrix(start, targets)
    order = _nn_order(dist, len(targets))
    latency = time.perf_counter() - t0
    return Route(tuple(order), path_length(start, targets, order), latency, Optimality.HEURISTIC)


def brute_force_path(start: Point2D, targets: Sequence[Point2D]) -> Route:
    """Exhaustive permutation scan; lowest lexicographic order wins ties."""
    n = len(targets)
    if n > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX} targets, got {n}")
    t0 = time.perf_counter()
    best_order: tuple[int, ...] = ()
    best_len = math.inf if n else 0.0
    for perm in itertools.permutations(range(n)):
        length = path_length(start, targets, perm)
        if length < best_len:
            best_order, best_len = perm, length
    return Route(best_order, best_len, time.perf_counter() - t0, Optimality.PROVEN_OPTIMAL)


def held_karp_path(start: Point2D, targets: Sequence[Point2D]) -> Route:
    """Subset dynamic programme over open paths, vectorised by subset size."""
    n = len(targets)
    if n > HELD_KARP_MAX + 5:
        raise ValueError(f"Held-Karp table too large for {n} targets")
    t0 = time.perf_counter()
    if n == 0:
        return Route((), 0.0, time.perf_counter() - t0, Optimality.PROVEN_OPTIMAL)
    full = np.array(distance_matrix(start, targets))
    leg = full[1:, 1:]
    size = 1 << n
    cost = np.full((size, n), np.inf)
    parent = np.full((size, n), -1, dtype=np.int8)
    for j in range(n):
        cost[1 << j, j] = full[0, j + 1]

    masks = np.arange(size)
    popcount = np.zeros(size, dtype=np.int64)
    for j in range(n):
        popcount += (masks >> j) & 1
    for k in range(2, n + 1):
        layer = masks[popcount == k]
        for j in range(n):
            sub = layer[(layer >> j) & 1 == 1]
            prev = sub ^ (1 << j)
            # cost of ending at i over prev, then the leg i -> j
            cand = cost[prev] + leg[:, j]
            best_i = np.argmin(cand, axis=1)
            cost[sub, j] = cand[np.arange(len(sub)), best_i]
            parent[sub, j] = best_i

    last = int(np.argmin(cost[size - 1]))
    order = []
    mask = size - 1
    j = last
    while j != -1:
        order.append(j)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.reverse()
    return Route(tuple(order), path_length(start, targets, order),
                 time.perf_counter() - t0, Optimality.PROVEN_OPTIMAL)


def _two_opt(dist: list[list[float]], order: list[int]) -> list[int]:
    """Open-path 2-opt on node indices (0 is the fixed start)."""
    path = [0] + [k + 1 for k in order]
    m = len(path)
    improved = True
    while improved:
        improved = False
        for i in range(m - 1):
            for j in range(i + 2, m):
                a, b = path[i], path[i + 1]
                c = path[j]
                d_old = dist[a][b]
                d_new = dist[a][c]
                if j + 1 < m:
                    d = path[j + 1]
                    d_old += dist[c][d]
                    d_new += dist[b][d]
                if d_new < d_old - 1e-12:
                    path[i + 1:j + 1] = reversed(path[i + 1:j + 1])
                    improved = True
    return [k - 1 for k in path[1:]]


def _mst_weight(dist: list[list[float]], nodes: list[int]) -> float:
    if len(nodes) <= 1:
        return 0.0
    best = {v: dist[nodes[0]][v] for v in nodes[1:]}
    total = 0.0
    while best:
        v = min(best, key=best.__getitem__)
        total += best.pop(v)
        row = dist[v]
        for u in best:
            if row[u] < best[u]:
                best[u] = row[u]
    return total


class _BudgetExceeded(Exception):
    pass


def branch_and_bound_path(start: Point2D, targets: Sequence[Point2D],
                          budget: float = DEFAULT_BUDGET) -> Route:
    """Depth-first branch and bound with an MST lower bound.

    The bound at a partial path ending at ``cur`` with unvisited set ``U`` is
    ``min_u d(cur, u) + MST(U)``, which never exceeds the cost of finishing the
    path. The incumbent is warm-started from the nearest-neighbour chain
    (polished by 2-opt). If ``budget`` seconds elapse the best incumbent is
    returned flagged as budget-truncated.
    """
    n = len(targets)
    t0 = time.perf_counter()
    if n == 0:
        return Route((), 0.0, time.perf_counter() - t0, Optimality.PROVEN_OPTIMAL)
    dist = distance_matrix(start, targets)
    incumbent = _two_opt(dist, _nn_order(dist, n))
    best_len = path_length(start, targets, incumbent)
    best_path = [k + 1 for k in incumbent]
    deadline = t0 + budget
    mst_cache: dict[int, float] = {}
    nodes_seen = 0
    path: list[int] = []

    def lower_bound(cur: int, mask: int, remaining: list[int]) -> float:
        mst = mst_cache.get(mask)
        if mst is None:
            mst = _mst_weight(dist, remaining)
            mst_cache[mask] = mst
        row = dist[cur]
        return min(row[u] for u in remaining) + mst

    def search(cur: int, mask: int, length: float, remaining: list[int]) -> None:
        nonlocal best_len, best_path, nodes_seen
        nodes_seen += 1
        if nodes_seen & 63 == 0 and time.perf_counter() > deadline:
            raise _BudgetExceeded
        if not remaining:
            if length < best_len:
                best_len = length
                best_path = list(path)
            return
        row = dist[cur]
        for nxt in sorted(remaining, key=lambda u: (row[u], u)):
            new_len = length + row[nxt]
            rest = [u for u in remaining if u != nxt]
            new_mask = mask & ~(1 << nxt)
            if rest:
                if new_len + lower_bound(nxt, new_mask, rest) >= best_len:
                    continue
            elif new_len >= best_len:
                continue
            path.append(nxt)
            search(nxt, new_mask, new_len, rest)
            path.pop()

    optimality = Optimality.PROVEN_OPTIMAL
    all_mask = sum(1 << u for u in range(1, n + 1))
    try:
        search(0, all_mask, 0.0, list(range(1, n + 1)))
    except _BudgetExceeded:
        optimality = Optimality.BUDGET_TRUNCATED
    order = tuple(k - 1 for k in best_path)
    return Route(order, path_length(start, targets, order),
                 time.perf_counter() - t0, optimality)


def exact_path(start: Point2D, targets: Sequence[Point2D],
               budget: float = DEFAULT_BUDGET) -> Route:
    """Minimum-length open path over all targets from ``start``.

    Held-Karp up to ``HELD_KARP_MAX`` targets, branch and bound beyond.
    """
    if len(targets) <= HELD_KARP_MAX:
        return held_karp_path(start, targets)
    return branch_and_bound_path(start, targets, budget)
