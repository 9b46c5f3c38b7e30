"""Scripted scenarios: actors rendered as point blobs plus script-derived truth."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from ..detector.clustering import PointCloudFrame

FORMAT_VERSION = 1


class ScenarioSpecError(ValueError):
    """Invalid actor script; the message starts with the offending field path."""


@dataclass(frozen=True)
class TruthObject:
    label: str
    pos: tuple[float, float, float]
    dangerous: bool


@dataclass
class FrameTruth:
    frame_id: int
    objects: list[TruthObject] = field(default_factory=list)


@dataclass
class Scenario:
    name: str
    frame_rate_hz: float
    vehicle_width_m: float
    seed: int
    frames: list[PointCloudFrame] = field(default_factory=list)
    ground_truth: list[FrameTruth] = field(default_factory=list)

    def __post_init__(self):
        if not self.frame_rate_hz > 0:
            raise ValueError("frame_rate_hz must be positive")
        if len(self.frames) != len(self.ground_truth):
            raise ValueError("every frame needs exactly one truth record")
        for frame, truth in zip(self.frames, self.ground_truth):
            if frame.frame_id != truth.frame_id:
                raise ValueError(f"truth record {truth.frame_id} does not follow frame {frame.frame_id}")
            if not math.isclose(frame.timestamp, frame.frame_id / self.frame_rate_hz, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(f"frame {frame.frame_id}: timestamp {frame.timestamp} is not frame_id / frame_rate")

    @property
    def duration_s(self) -> float:
        return len(self.frames) / self.frame_rate_hz


@dataclass(frozen=True)
class ActorScript:
    """Constant-velocity actor. ``position`` is where it sits at ``appear_at``."""

    label: str
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    n_points: int = 30
    noise: float = 0.0  # per-frame jitter of the whole blob, std dev in meters
    spread: float = 0.15  # std dev of the blob's point cloud around its center
    appear_at: float = 0.0
    vanish_at: Optional[float] = None

    def pose(self, t: float) -> np.ndarray:
        return np.asarray(self.position) + np.asarray(self.velocity) * (t - self.appear_at)

    def active(self, t: float) -> bool:
        return t >= self.appear_at and (self.vanish_at is None or t < self.vanish_at)


def _vec3(value: Any, path: str) -> tuple[float, float, float]:
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ScenarioSpecError(f"{path}: expected 3 numbers, got {value!r}") from None
    if len(out) != 3 or not all(math.isfinite(v) for v in out):
        raise ScenarioSpecError(f"{path}: expected 3 finite numbers, got {value!r}")
    return out


def parse_actor(data: Any, path: str = "actor") -> ActorScript:
    if isinstance(data, ActorScript):
        data = data.__dict__
    if not isinstance(data, dict):
        raise ScenarioSpecError(f"{path}: expected an object")
    known = set(ActorScript.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ScenarioSpecError(f"{path}.{sorted(extra)[0]}: unknown field")
    for key in ("label", "position", "velocity"):
        if key not in data:
            raise ScenarioSpecError(f"{path}.{key}: required field missing")
    label = data["label"]
    if not isinstance(label, str) or not label:
        raise ScenarioSpecError(f"{path}.label: expected a non-empty string")

    kwargs: dict[str, Any] = {
        "label": label,
        "position": _vec3(data["position"], f"{path}.position"),
        "velocity": _vec3(data["velocity"], f"{path}.velocity"),
    }
    n_points = data.get("n_points", 30)
    if isinstance(n_points, bool) or not isinstance(n_points, int) or n_points < 1:
        raise ScenarioSpecError(f"{path}.n_points: expected a positive integer")
    kwargs["n_points"] = n_points
    for key, default in (("noise", 0.0), ("spread", 0.15), ("appear_at", 0.0)):
        val = data.get(key, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val) or val < 0:
            raise ScenarioSpecError(f"{path}.{key}: expected a non-negative number")
        kwargs[key] = float(val)
    vanish = data.get("vanish_at")
    if vanish is not None:
        if isinstance(vanish, bool) or not isinstance(vanish, (int, float)) or vanish <= kwargs["appear_at"]:
            raise ScenarioSpecError(f"{path}.vanish_at: must be a number after appear_at")
        vanish = float(vanish)
    kwargs["vanish_at"] = vanish
    return ActorScript(**kwargs)


def scripted_danger(pos: Sequence[float], vel: Sequence[float], reaction_time_s: float, width_w: float) -> bool:
    """Truth label from the script alone.

    Dangerous when the actor is ahead, closing in, within the distance it
    covers in the reaction time, and its straight path over that horizon
    enters the vehicle's corridor |y| < width_w ahead of the bumper.
    """
    px, py = float(pos[0]), float(pos[1])
    vx, vy = float(vel[0]), float(vel[1])
    if px < 0:
        return False
    speed = math.hypot(vx, vy)
    if math.hypot(px, py) > speed * reaction_time_s + 1e-9:
        return False
    if px * vx + py * vy >= 0:
        return False
    lo, hi = 0.0, reaction_time_s
    if vy == 0:
        if abs(py) >= width_w:
            return False
    else:
        a, b = sorted(((-width_w - py) / vy, (width_w - py) / vy))
        lo, hi = max(lo, a), min(hi, b)
    if vx < 0:
        hi = min(hi, -px / vx)
    return lo < hi


def generate_scenario(
    actors: Iterable[Any],
    duration_s: float,
    frame_rate_hz: float = 10.0,
    seed: int = 0,
    *,
    name: str = "custom",
    vehicle_width_m: float = 2.0,
    reaction_time_s: float = 3.0,
    ego_velocity: Sequence[float] = (0.0, 0.0),
) -> Scenario:
    """Render actor scripts into point-cloud frames with ground truth.

    Each actor owns a fixed point template drawn once and centered on its
    pose, so with ``noise=0`` the fitted box center follows the script. Random streams are keyed by
    (seed, actor index) and do not depend on other actors.
    """
    scripts = [parse_actor(a, f"actors[{k}]") for k, a in enumerate(actors)]
    if not (isinstance(duration_s, (int, float)) and duration_s >= 0 and math.isfinite(duration_s)):
        raise ScenarioSpecError(f"duration: expected a non-negative number, got {duration_s!r}")
    if not (isinstance(frame_rate_hz, (int, float)) and frame_rate_hz > 0):
        raise ScenarioSpecError(f"frame_rate: expected a positive number, got {frame_rate_hz!r}")
    if not vehicle_width_m > 0:
        raise ScenarioSpecError("vehicle_width: expected a positive number")
    n_frames = int(round(duration_s * frame_rate_hz))
    ego_v = np.array([float(ego_velocity[0]), float(ego_velocity[1]), 0.0])
    ego_step = tuple(float(v) for v in ego_v[:2] / frame_rate_hz)

    templates, jitters = [], []
    for k, actor in enumerate(scripts):
        tpl_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k, 0)))
        jit_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k, 1)))
        tpl = tpl_rng.normal(0.0, actor.spread, size=(actor.n_points, 3))
        tpl = np.clip(tpl, -2 * actor.spread, 2 * actor.spread)
        # put the template's box center on the scripted pose
        templates.append(tpl - (tpl.min(axis=0) + tpl.max(axis=0)) / 2.0)
        jitters.append(jit_rng.normal(0.0, actor.noise, size=(n_frames, 3)) if actor.noise > 0
                       else np.zeros((n_frames, 3)))

    frames, truth = [], []
    for fid in range(n_frames):
        t = fid / frame_rate_hz
        ego_pos = ego_v * t
        blobs, objects = [], []
        for actor, tpl, jit in zip(scripts, templates, jitters):
            if not actor.active(t):
                continue
            rel = actor.pose(t) - ego_pos
            blobs.append(tpl + (rel + jit[fid]))
            objects.append(TruthObject(
                actor.label,
                tuple(float(v) for v in rel),
                scripted_danger(rel, actor.velocity, reaction_time_s, vehicle_width_m),
            ))
        points = np.vstack(blobs) if blobs else np.zeros((0, 3))
        frames.append(PointCloudFrame(fid, t, points, ego_step if fid > 0 else (0.0, 0.0)))
        truth.append(FrameTruth(fid, objects))
    return Scenario(name, float(frame_rate_hz), float(vehicle_width_m), int(seed), frames, truth)


_PEDESTRIAN_Z = 0.9

# Isolated-event preset: 47 brief encounters, far enough apart that each
# lights the lamp for exactly one timer cycle.
ISOLATED_EVENTS = 47
ISOLATED_SPACING_S = 28.0


def preset_actors(name: str) -> tuple[list[dict], float]:
    """Actor scripts and duration for a named preset."""
    z = _PEDESTRIAN_Z
    if name == "approach":
        return [{"label": "pedestrian", "position": [12.0, 0.0, z], "velocity": [-2.0, 0.0, 0.0]}], 5.5
    if name == "away":
        return [{"label": "pedestrian", "position": [3.0, 0.0, z], "velocity": [2.0, 0.0, 0.0]}], 5.0
    if name == "perpendicular":
        return [{"label": "pedestrian", "position": [6.0, 3.0, z], "velocity": [0.0, 1.5, 0.0]}], 6.0
    if name == "parallel":
        return [{"label": "pedestrian", "position": [12.0, 3.5, z], "velocity": [-1.5, 0.0, 0.0]}], 8.0
    if name == "mixed":
        return [
            {"label": "crossing-front", "position": [12.0, 0.0, z], "velocity": [-2.0, 0.0, 0.0]},
            {"label": "sidewalk-left", "position": [14.0, 3.5, z], "velocity": [-1.5, 0.0, 0.0]},
            {"label": "leaving-right", "position": [8.0, -3.0, z], "velocity": [0.0, -1.5, 0.0]},
        ], 5.5
    if name == "isolated":
        actors = [
            {
                "label": f"event-{k:02d}",
                "position": [4.0, 0.0, z],
                "velocity": [-2.0, 0.0, 0.0],
                "appear_at": k * ISOLATED_SPACING_S + 1.0,
                "vanish_at": k * ISOLATED_SPACING_S + 2.0,
            }
            for k in range(ISOLATED_EVENTS)
        ]
        return actors, ISOLATED_EVENTS * ISOLATED_SPACING_S
    raise ScenarioSpecError(f"preset: unknown preset {name!r} (choose from {', '.join(PRESETS)})")


PRESETS = ("approach", "away", "perpendicular", "parallel", "mixed", "isolated")


def make_preset(name: str, seed: int = 0, *, noise: float = 0.0, frame_rate_hz: float = 10.0,
                reaction_time_s: float = 3.0, vehicle_width_m: float = 2.0) -> Scenario:
    actors, duration = preset_actors(name)
    if noise:
        actors = [dict(a, noise=noise) for a in actors]
    return generate_scenario(actors, duration, frame_rate_hz, seed, name=name,
                             vehicle_width_m=vehicle_width_m, reaction_time_s=reaction_time_s)
