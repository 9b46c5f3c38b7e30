"""Frame-by-frame obstacle tracker: cluster, box, associate, estimate, filter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..geometry import BoundingBox3D, heading_to_yaw
from .assignment import associate
from .clustering import PointCloudFrame, euclidean_cluster, fit_bounding_box
from .config import DetectorConfig
from .kalman import KalmanState, initial_state, kalman_predict, kalman_update


def _ego3(ego_translation, sign: float = 1.0) -> np.ndarray:
    return sign * np.array([ego_translation[0], ego_translation[1], 0.0], dtype=float)


def estimate_velocity(prev: BoundingBox3D, curr: BoundingBox3D, ego_translation=(0.0, 0.0),
                      ego_sign: float = 1.0) -> np.ndarray:
    """Box-center translation plus the vehicle's own translation, per second."""
    dt = curr.timestamp - prev.timestamp
    if not dt > 0:
        raise ValueError(f"boxes must be time-ordered (dt={dt})")
    return (curr.center() - prev.center() + _ego3(ego_translation, ego_sign)) / dt


def estimate_orientation(prev: BoundingBox3D, curr: BoundingBox3D, ego_translation=(0.0, 0.0),
                         ego_sign: float = 1.0) -> Optional[float]:
    """Yaw of the ego-compensated planar displacement; None when stationary."""
    if not curr.timestamp > prev.timestamp:
        raise ValueError("boxes must be time-ordered")
    disp = curr.center() - prev.center() + _ego3(ego_translation, ego_sign)
    return heading_to_yaw(disp[:2])


@dataclass(frozen=True, eq=False)
class TrackedObject:
    track_id: int
    box: BoundingBox3D
    position: np.ndarray
    velocity: np.ndarray
    speed: float
    yaw: Optional[float]  # None means stationary / heading unknown
    age_frames: int

    @property
    def stationary(self) -> bool:
        return self.yaw is None

    def to_record(self) -> dict:
        return {
            "track_id": self.track_id,
            "position": [float(v) for v in self.position],
            "velocity": [float(v) for v in self.velocity],
            "speed": self.speed,
            "yaw": self.yaw,
            "age": self.age_frames,
            "box": [list(self.box.min_corner), list(self.box.max_corner)],
        }


@dataclass
class _Track:
    track_id: int
    box: BoundingBox3D
    filter: Optional[KalmanState]  # None until a second sighting provides velocity
    age: int = 1


@dataclass
class Tracker:
    """Mutable multi-object tracker; feed frames in timestamp order.

    A track survives only while it is matched in every consecutive frame.
    """

    cfg: DetectorConfig = field(default_factory=DetectorConfig)
    _tracks: list[_Track] = field(default_factory=list, init=False)
    _next_id: int = field(default=0, init=False)
    _last_time: Optional[float] = field(default=None, init=False)
    _last_frame_id: Optional[int] = field(default=None, init=False)

    def process_frame(self, frame: PointCloudFrame) -> list[TrackedObject]:
        if self._last_time is not None and not (
            frame.timestamp > self._last_time and frame.frame_id > self._last_frame_id
        ):
            raise ValueError(
                f"frame {frame.frame_id} at t={frame.timestamp} arrived out of order "
                f"(last frame {self._last_frame_id} at t={self._last_time})"
            )
        cfg = self.cfg
        clusters = euclidean_cluster(frame, cfg)
        boxes = [fit_bounding_box(frame, c, box_id=k) for k, c in enumerate(clusters)]
        assoc = associate([t.box for t in self._tracks], boxes, cfg)

        survivors: list[_Track] = []
        for i, j in assoc.matches:
            track, box = self._tracks[i], boxes[j]
            vel = estimate_velocity(track.box, box, frame.ego_translation, cfg.ego_sign)
            center = box.center()
            if track.filter is None:
                # two-point initialisation: first velocity reading seeds the filter
                state = initial_state(center, vel, cfg)
            else:
                dt = box.timestamp - track.box.timestamp
                # re-anchor the sensor-frame position to the vehicle's new pose
                shifted = track.filter.state_vector - np.concatenate(
                    [_ego3(frame.ego_translation, cfg.ego_sign), np.zeros(3)])
                state = kalman_predict(KalmanState(shifted, track.filter.covariance), dt, cfg)
                state = kalman_update(state, center, vel, cfg)
            survivors.append(_Track(track.track_id, box, state, track.age + 1))
        for j in assoc.unmatched_curr:
            survivors.append(_Track(self._next_id, boxes[j], None))
            self._next_id += 1

        survivors.sort(key=lambda t: t.track_id)
        self._tracks = survivors
        self._last_time = frame.timestamp
        self._last_frame_id = frame.frame_id
        return [self._report(t) for t in survivors]

    @staticmethod
    def _report(track: _Track) -> TrackedObject:
        if track.filter is None:
            pos, vel = track.box.center(), np.zeros(3)
        else:
            pos, vel = np.array(track.filter.position), np.array(track.filter.velocity)
        speed = math.hypot(vel[0], vel[1])
        yaw = heading_to_yaw(vel[:2]) if track.filter is not None else None
        return TrackedObject(track.track_id, track.box, pos, vel, speed, yaw, track.age)


def process_frame(tracker: Tracker, frame: PointCloudFrame) -> list[TrackedObject]:
    return tracker.process_frame(frame)
