import itertools
import math

import pytest

from sarplan.geometry import Geofence, Point2D


@pytest.fixture
def box():
    return Geofence.rectangle(0.0, 0.0, 600.0, 400.0)


@pytest.fixture
def small_box():
    return Geofence.rectangle(0.0, 0.0, 100.0, 40.0)


def enumerate_open_paths(start, targets):
    """Independent oracle: (length, order) for every permutation, lexicographic."""
    out = []
    for perm in itertools.permutations(range(len(targets))):
        cur, total = start, 0.0
        for k in perm:
            total += math.hypot(targets[k].x - cur.x, targets[k].y - cur.y)
            cur = targets[k]
        out.append((total, perm))
    return out


def regular_polygon(n, radius, phase=0.0, cx=0.0, cy=0.0):
    return Geofence(tuple(
        Point2D(cx + radius * math.cos(phase + 2 * math.pi * k / n),
                cy + radius * math.sin(phase + 2 * math.pi * k / n))
        for k in range(n)
    ))


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def record_note(text):
    ACCEPTANCE_LINES.append(f"       {text}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
