"""Scenario JSON and trace CSV formats.

Scenario file (all lengths in metres, times in seconds, speed in m/s,
angles in radians)::

    {
      "schema_version": "1.0",
      "fence": {"vertices": [[x, y], ...], "eps": 0.01},
      "rois": [{"id": 0, "x": 12.5, "y": 40.0, "appear_time": 0.0}, ...],
      "delta": 50.0,
      "sensor_radius": 25.0,
      "speed": 5.0,
      "start": [x, y] | null,
      "dt": 0.1,
      "rng_seed": 7,
      "orientation": 0.0
    }

Trace CSV: one row per simulation step with columns ``TRACE_COLUMNS``.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Union

import jsonschema

from .geometry import Geofence, Point2D
from .planners import Roi
from .simulator import Scenario, Trace, TraceRow

SCHEMA_VERSION = "1.0"
UNITS = {"length": "m", "time": "s", "speed": "m/s", "angle": "rad"}

_NUM = {"type": "number"}
_XY = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "fence", "rois", "delta", "sensor_radius",
                 "speed", "start", "dt", "rng_seed"],
    "properties": {
        "schema_version": {"type": "string", "pattern": r"^\d+\.\d+$"},
        "units": {"type": "object"},
        "fence": {
            "type": "object",
            "required": ["vertices"],
            "properties": {
                "vertices": {"type": "array", "items": _XY, "minItems": 3},
                "eps": {"type": "number", "minimum": 0},
            },
        },
        "rois": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "x", "y"],
                "properties": {
                    "id": {"type": "integer"},
                    "x": _NUM,
                    "y": _NUM,
                    "appear_time": {"type": "number", "minimum": 0},
                },
            },
        },
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "sensor_radius": {"type": "number", "minimum": 0},
        "speed": {"type": "number", "exclusiveMinimum": 0},
        "start": {"oneOf": [_XY, {"type": "null"}]},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "rng_seed": {"type": "integer"},
        "orientation": _NUM,
    },
}

TRACE_COLUMNS = ("step", "t", "x", "y", "mode", "pending", "grid_index",
                 "target_x", "target_y", "events")

PathLike = Union[str, Path]


class ScenarioFormatError(ValueError):
    """Raised for malformed or invalid scenario files."""


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "units": UNITS,
        "fence": {"vertices": [[p.x, p.y] for p in sc.fence.vertices], "eps": sc.fence.eps},
        "rois": [{"id": r.id, "x": r.position.x, "y": r.position.y,
                  "appear_time": r.appear_time} for r in sc.rois],
        "delta": sc.delta,
        "sensor_radius": sc.sensor_radius,
        "speed": sc.speed,
        "start": None if sc.start is None else [sc.start.x, sc.start.y],
        "dt": sc.dt,
        "rng_seed": sc.rng_seed,
        "orientation": sc.orientation,
    }


def _json_path(error: jsonschema.ValidationError) -> str:
    out = "$"
    for part in error.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def scenario_from_dict(data: dict, source: str = "<scenario>") -> Scenario:
    try:
        jsonschema.validate(data, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as e:
        raise ScenarioFormatError(f"{source}: {_json_path(e)}: {e.message}") from None
    major = data["schema_version"].split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise ScenarioFormatError(
            f"{source}: $.schema_version: unsupported major version {data['schema_version']!r}"
        )
    try:
        fence = Geofence(tuple(Point2D(*v) for v in data["fence"]["vertices"]),
                         **({"eps": data["fence"]["eps"]} if "eps" in data["fence"] else {}))
        rois = tuple(Roi(r["id"], Point2D(r["x"], r["y"]), r.get("appear_time", 0.0))
                     for r in data["rois"])
        start = None if data["start"] is None else Point2D(*data["start"])
        return Scenario(fence=fence, rois=rois, delta=data["delta"],
                        sensor_radius=data["sensor_radius"], speed=data["speed"],
                        start=start, dt=data["dt"], rng_seed=data["rng_seed"],
                        orientation=data.get("orientation", 0.0))
    except ValueError as e:
        raise ScenarioFormatError(f"{source}: {e}") from None


def dumps_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


def save_scenario(sc: Scenario, path: PathLike) -> None:
    Path(path).write_text(dumps_scenario(sc))


def load_scenario(path: PathLike) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(f"{path}: invalid JSON: {e}") from None
    return scenario_from_dict(data, str(path))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dumps_trace(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in trace.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def save_trace(trace: Trace, path: PathLike) -> None:
    Path(path).write_text(dumps_trace(trace))


def load_trace(path: PathLike) -> Trace:
    """Read a trace CSV back; ROI lifecycle states are not stored in the CSV."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(TraceRow(
                int(rec["step"]), float(rec["t"]), float(rec["x"]), float(rec["y"]),
                rec["mode"], int(rec["pending"]), int(rec["grid_index"]),
                float(rec["target_x"]) if rec["target_x"] else None,
                float(rec["target_y"]) if rec["target_y"] else None,
                rec["events"],
            ))
    return Trace(rows=rows)
