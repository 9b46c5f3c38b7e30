"""Danger labelling from section, heading and the reaction-distance threshold.

Two policies are supported. ``CURRENT`` splits the frontal field of view
by lateral offset against the vehicle width and applies a 150 degree facing
window in every section. ``LEGACY`` splits by bearing (45/90/45 degrees),
uses 180 degree side windows and ignores heading straight ahead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


class Section(str, enum.Enum):
    LEFT = "left"
    FRONT = "front"
    RIGHT = "right"


class Policy(str, enum.Enum):
    CURRENT = "current"
    LEGACY = "legacy"


# Closed yaw intervals in degrees. The legacy left window ends at 360, which on
# normalised yaw in [0, 360) behaves as half-open. None means always facing.
FACING_WINDOWS: dict[Policy, dict[Section, Optional[tuple[float, float]]]] = {
    Policy.CURRENT: {
        Section.LEFT: (195.0, 345.0),
        Section.FRONT: (105.0, 255.0),
        Section.RIGHT: (15.0, 165.0),
    },
    Policy.LEGACY: {
        Section.LEFT: (180.0, 360.0),
        Section.FRONT: None,
        Section.RIGHT: (0.0, 180.0),
    },
}

LEGACY_FRONT_HALF_ANGLE = 45.0

# Float slack on the distance-vs-threshold comparison (meters). Integer-valued
# distances placed on a circle come back from hypot a few ulps off.
DISTANCE_SLACK = 1e-9


@dataclass(frozen=True)
class DangerConfig:
    reaction_time_s: float = 3.0
    vehicle_width_w: float = 2.0
    policy: Policy = Policy.CURRENT

    def __post_init__(self):
        if not self.reaction_time_s > 0:
            raise ValueError("reaction_time_s must be > 0")
        if not self.vehicle_width_w > 0:
            raise ValueError("vehicle_width_w must be > 0")
        object.__setattr__(self, "policy", Policy(self.policy))


@dataclass(frozen=True)
class DangerVerdict:
    track_id: int
    dangerous: bool
    section: Optional[Section]  # None for objects behind the vehicle
    distance_m: float
    threshold_m: float
    facing: bool

    def to_record(self) -> dict:
        return {
            "track_id": self.track_id,
            "dangerous": self.dangerous,
            "section": self.section.value if self.section else None,
            "distance": self.distance_m,
            "threshold": self.threshold_m,
            "facing": self.facing,
        }


def classify_section(center: Sequence[float], cfg: DangerConfig) -> Section:
    """Lateral split: |y| < w is the direct path, the boundary belongs to the sides."""
    y = float(center[1])
    w = cfg.vehicle_width_w
    if y >= w:
        return Section.LEFT
    if y <= -w:
        return Section.RIGHT
    return Section.FRONT


def classify_section_legacy(center: Sequence[float]) -> Section:
    bearing = math.degrees(math.atan2(float(center[1]), float(center[0])))
    if abs(bearing) <= LEGACY_FRONT_HALF_ANGLE:
        return Section.FRONT
    return Section.LEFT if bearing > 0 else Section.RIGHT


def is_facing_vehicle(yaw: Optional[float], section: Section, policy: Policy = Policy.CURRENT) -> bool:
    if yaw is None:
        # no heading yet: err on the side of lighting up
        return True
    window = FACING_WINDOWS[Policy(policy)][Section(section)]
    if window is None:
        return True
    return window[0] <= yaw <= window[1]


def danger_threshold(speed: float, cfg: DangerConfig) -> float:
    if speed < 0:
        raise ValueError("speed must be non-negative")
    return speed * cfg.reaction_time_s


def _section_for(center, cfg: DangerConfig) -> Section:
    if cfg.policy is Policy.LEGACY:
        return classify_section_legacy(center)
    return classify_section(center, cfg)


def assess(track_id: int, center, speed: float, yaw: Optional[float], cfg: DangerConfig) -> DangerVerdict:
    dist = math.hypot(float(center[0]), float(center[1]))
    thr = danger_threshold(speed, cfg)
    if center[0] < 0:
        return DangerVerdict(track_id, False, None, dist, thr, False)
    section = _section_for(center, cfg)
    facing = is_facing_vehicle(yaw, section, cfg.policy)
    return DangerVerdict(track_id, facing and dist <= thr + DISTANCE_SLACK, section, dist, thr, facing)


def detect_danger(tracks: Iterable, cfg: DangerConfig) -> list[DangerVerdict]:
    """One verdict per track, in input order.

    Tracks need ``track_id``, ``position``, ``speed`` and ``yaw`` attributes.
    """
    return [assess(t.track_id, t.position, t.speed, t.yaw, cfg) for t in tracks]


def dangerous_subset(verdicts: Iterable[DangerVerdict]) -> list[DangerVerdict]:
    return [v for v in verdicts if v.dangerous]


def danger_mask(positions: np.ndarray, speeds: np.ndarray, yaws: np.ndarray, cfg: DangerConfig) -> np.ndarray:
    """Array form of :func:`detect_danger` for bulk synthetic objects.

    ``positions`` is (N, 2+), ``yaws`` uses NaN for stationary objects.
    """
    positions = np.asarray(positions, dtype=float)
    speeds = np.asarray(speeds, dtype=float)
    yaws = np.asarray(yaws, dtype=float)
    x, y = positions[:, 0], positions[:, 1]
    dist = np.hypot(x, y)
    near = dist <= speeds * cfg.reaction_time_s + DISTANCE_SLACK

    if cfg.policy is Policy.LEGACY:
        bearing = np.degrees(np.arctan2(y, x))
        sections = {
            Section.LEFT: bearing > LEGACY_FRONT_HALF_ANGLE,
            Section.RIGHT: bearing < -LEGACY_FRONT_HALF_ANGLE,
        }
    else:
        w = cfg.vehicle_width_w
        sections = {Section.LEFT: y >= w, Section.RIGHT: y <= -w}
    sections[Section.FRONT] = ~(sections[Section.LEFT] | sections[Section.RIGHT])

    facing = np.isnan(yaws)
    for section, members in sections.items():
        window = FACING_WINDOWS[cfg.policy][section]
        if window is None:
            facing = facing | members
        else:
            facing = facing | (members & (yaws >= window[0]) & (yaws <= window[1]))
    return near & facing & (x >= 0)
