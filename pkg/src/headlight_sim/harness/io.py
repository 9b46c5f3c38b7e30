"""Line-delimited JSON scenario files.

Line 1 is a header ``{"version": 1, "name", "frame_rate_hz",
"vehicle_width_m", "seed"}``. Then, per frame, a frame record
``{"frame_id", "t", "ego": [dx, dy], "points": [[x, y, z], ...]}`` followed by
its truth record ``{"frame_id", "objects": [{"label", "pos", "dangerous"}]}``.
Floats are written with ``repr`` precision, so save/load is exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import IO, Any, Iterable, Union

import numpy as np

from ..detector.clustering import PointCloudFrame
from .scenario import FORMAT_VERSION, FrameTruth, Scenario, TruthObject

PathLike = Union[str, Path]


class ScenarioFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ScenarioVersionError(ScenarioFormatError):
    pass


def dump_record(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def scenario_lines(scenario: Scenario) -> Iterable[str]:
    yield dump_record({
        "version": FORMAT_VERSION,
        "name": scenario.name,
        "frame_rate_hz": scenario.frame_rate_hz,
        "vehicle_width_m": scenario.vehicle_width_m,
        "seed": scenario.seed,
    })
    for frame, truth in zip(scenario.frames, scenario.ground_truth):
        yield dump_record({
            "frame_id": frame.frame_id,
            "t": frame.timestamp,
            "ego": list(frame.ego_translation),
            "points": frame.points.tolist(),
        })
        yield dump_record({
            "frame_id": truth.frame_id,
            "objects": [
                {"label": o.label, "pos": list(o.pos), "dangerous": o.dangerous} for o in truth.objects
            ],
        })


def dumps_scenario(scenario: Scenario) -> str:
    return "".join(line + "\n" for line in scenario_lines(scenario))


def save_scenario(scenario: Scenario, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in scenario_lines(scenario):
            fh.write(line + "\n")


def _number(rec: dict, key: str, line: int, *, integer: bool = False) -> Any:
    if key not in rec:
        raise ScenarioFormatError(f"missing field {key!r}", line)
    val = rec[key]
    ok = isinstance(val, int) if integer else isinstance(val, (int, float))
    if isinstance(val, bool) or not ok or (not integer and not math.isfinite(val)):
        raise ScenarioFormatError(f"field {key!r} must be {'an integer' if integer else 'a number'}", line)
    return val


def _vector(val: Any, size: int, what: str, line: int) -> list[float]:
    if (not isinstance(val, list) or len(val) != size
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)):
        raise ScenarioFormatError(f"{what} must be a list of {size} numbers", line)
    return [float(v) for v in val]


def _parse_header(rec: Any, line: int) -> dict:
    if not isinstance(rec, dict):
        raise ScenarioFormatError("header must be an object", line)
    version = rec.get("version")
    if version != FORMAT_VERSION:
        raise ScenarioVersionError(f"unsupported scenario format version {version!r} (expected {FORMAT_VERSION})", line)
    if not isinstance(rec.get("name"), str):
        raise ScenarioFormatError("header field 'name' must be a string", line)
    return {
        "name": rec["name"],
        "frame_rate_hz": float(_number(rec, "frame_rate_hz", line)),
        "vehicle_width_m": float(_number(rec, "vehicle_width_m", line)),
        "seed": _number(rec, "seed", line, integer=True),
    }


def _parse_frame(rec: Any, line: int) -> PointCloudFrame:
    if not isinstance(rec, dict) or "points" not in rec:
        raise ScenarioFormatError("expected a frame record", line)
    fid = _number(rec, "frame_id", line, integer=True)
    t = _number(rec, "t", line)
    ego = _vector(rec.get("ego", [0.0, 0.0]), 2, "ego", line)
    pts = rec["points"]
    if not isinstance(pts, list):
        raise ScenarioFormatError("points must be a list", line)
    rows = [_vector(p, 3, "each point", line) for p in pts]
    try:
        return PointCloudFrame(fid, float(t), np.array(rows, dtype=float).reshape(-1, 3), tuple(ego))
    except ValueError as exc:
        raise ScenarioFormatError(str(exc), line) from None


def _parse_truth(rec: Any, line: int, frame_id: int) -> FrameTruth:
    if not isinstance(rec, dict) or "objects" not in rec:
        raise ScenarioFormatError(f"expected the truth record for frame {frame_id}", line)
    fid = _number(rec, "frame_id", line, integer=True)
    if fid != frame_id:
        raise ScenarioFormatError(f"truth record for frame {fid} follows frame {frame_id}", line)
    if not isinstance(rec["objects"], list):
        raise ScenarioFormatError("objects must be a list", line)
    objects = []
    for obj in rec["objects"]:
        if not isinstance(obj, dict) or not isinstance(obj.get("label"), str) \
                or not isinstance(obj.get("dangerous"), bool):
            raise ScenarioFormatError("truth objects need a string label and boolean dangerous flag", line)
        objects.append(TruthObject(obj["label"], tuple(_vector(obj.get("pos"), 3, "pos", line)), obj["dangerous"]))
    return FrameTruth(fid, objects)


def read_scenario(fh: IO[str]) -> Scenario:
    header = None
    frames: list[PointCloudFrame] = []
    truth: list[FrameTruth] = []
    pending: PointCloudFrame | None = None
    lineno = 0
    for lineno, raw in enumerate(fh, start=1):
        if not raw.strip():
            raise ScenarioFormatError("blank line", lineno)
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"malformed JSON ({exc.msg})", lineno) from None
        if header is None:
            header = _parse_header(rec, lineno)
        elif pending is None:
            pending = _parse_frame(rec, lineno)
            if frames and not (pending.frame_id > frames[-1].frame_id and pending.timestamp > frames[-1].timestamp):
                raise ScenarioFormatError("frames must strictly increase in id and time", lineno)
        else:
            truth.append(_parse_truth(rec, lineno, pending.frame_id))
            frames.append(pending)
            pending = None
    if header is None:
        raise ScenarioFormatError("empty file, missing header", 1)
    if pending is not None:
        raise ScenarioFormatError(f"file ends before the truth record of frame {pending.frame_id}", lineno + 1)
    try:
        return Scenario(header["name"], header["frame_rate_hz"], header["vehicle_width_m"], header["seed"],
                        frames, truth)
    except ValueError as exc:
        raise ScenarioFormatError(str(exc), 1) from None


def loads_scenario(text: str) -> Scenario:
    return read_scenario(text.splitlines(keepends=True))


def load_scenario(path: PathLike) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return read_scenario(fh)
