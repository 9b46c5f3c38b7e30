"""Obstacle detection: point clouds in, tracked objects with velocity and yaw out."""

from .assignment import Association, associate, association_cost, hungarian
from .clustering import Cluster, PointCloudFrame, euclidean_cluster, fit_bounding_box
from .config import DetectorConfig
from .kalman import KalmanState, initial_state, kalman_predict, kalman_update
from .tracker import TrackedObject, Tracker, estimate_orientation, estimate_velocity, process_frame

__all__ = [
    "Association",
    "Cluster",
    "DetectorConfig",
    "KalmanState",
    "PointCloudFrame",
    "TrackedObject",
    "Tracker",
    "associate",
    "association_cost",
    "estimate_orientation",
    "estimate_velocity",
    "euclidean_cluster",
    "fit_bounding_box",
    "hungarian",
    "initial_state",
    "kalman_predict",
    "kalman_update",
    "process_frame",
]
