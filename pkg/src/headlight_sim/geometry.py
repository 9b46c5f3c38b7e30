"""Geometric primitives shared by every pipeline stage.

Frame convention: x points forward from the vehicle, y to the left, z up.
Yaw is measured counterclockwise from +x in degrees, so 0 is "driving ahead",
90 is "moving left" and 180 is "moving toward the vehicle".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# Planar displacement below this (meters) carries no heading information.
STATIONARY_EPS = 1e-6


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite point {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class BoundingBox3D:
    """Axis-aligned box in the sensor frame."""

    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]
    timestamp: float = 0.0
    box_id: int = 0

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min_corner)
        hi = tuple(float(v) for v in self.max_corner)
        if len(lo) != 3 or len(hi) != 3:
            raise ValueError("box corners must be 3-vectors")
        if not all(math.isfinite(v) for v in lo + hi):
            raise ValueError("box corners must be finite")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"min_corner {lo} exceeds max_corner {hi}")
        if self.timestamp < 0:
            raise ValueError("timestamp must be non-negative")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def center(self) -> np.ndarray:
        return (np.asarray(self.min_corner) + np.asarray(self.max_corner)) / 2.0

    def extent(self) -> np.ndarray:
        return np.asarray(self.max_corner) - np.asarray(self.min_corner)

    def volume(self) -> float:
        dx, dy, dz = (b - a for a, b in zip(self.min_corner, self.max_corner))
        return dx * dy * dz

    def contains(self, point: Sequence[float]) -> bool:
        return all(a <= p <= b for a, p, b in zip(self.min_corner, point, self.max_corner))


def iou_3d(a: BoundingBox3D, b: BoundingBox3D) -> float:
    """Volume intersection over union of two axis-aligned boxes.

    Zero-volume boxes give 0 unless the two boxes coincide exactly.
    """
    inter = 1.0
    for lo_a, hi_a, lo_b, hi_b in zip(a.min_corner, a.max_corner, b.min_corner, b.max_corner):
        side = min(hi_a, hi_b) - max(lo_a, lo_b)
        if side <= 0.0:
            inter = 0.0
            break
        inter *= side
    union = a.volume() + b.volume() - inter
    if union <= 0.0:
        same = a.min_corner == b.min_corner and a.max_corner == b.max_corner
        return 1.0 if same else 0.0
    return min(1.0, max(0.0, inter / union))


def angle_between(u: Sequence[float], v: Sequence[float]) -> float:
    """Unsigned angle in degrees between two planar vectors, in [0, 180]."""
    ux, uy = float(u[0]), float(u[1])
    vx, vy = float(v[0]), float(v[1])
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("angle_between is undefined for zero-length vectors")
    cos = (ux * vx + uy * vy) / (nu * nv)
    return math.degrees(math.acos(max(-1.0, min(1.0, cos))))


def normalize_yaw(deg: float) -> float:
    """Wrap an angle into [0, 360)."""
    out = float(deg) % 360.0
    # tiny negatives wrap to exactly 360.0 in floating point
    return 0.0 if out >= 360.0 else out


def heading_to_yaw(displacement: Sequence[float]) -> Optional[float]:
    """Counterclockwise heading of a planar displacement, or None when stationary.

    The magnitude is the arccos angle against +x; the y component picks the
    side, which the unsigned formula cannot.
    """
    dx, dy = float(displacement[0]), float(displacement[1])
    if math.hypot(dx, dy) < STATIONARY_EPS:
        return None
    unsigned = angle_between((dx, dy), (1.0, 0.0))
    return normalize_yaw(-unsigned if dy < 0 else unsigned)
