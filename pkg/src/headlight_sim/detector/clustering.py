"""Euclidean clustering and tight box fitting for point-cloud frames."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..geometry import BoundingBox3D
from .config import DetectorConfig


@dataclass(eq=False)
class PointCloudFrame:
    frame_id: int
    timestamp: float
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    ego_translation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"frame {self.frame_id}: points must have shape (N, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"frame {self.frame_id}: non-finite point coordinates")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"frame {self.frame_id}: invalid timestamp {self.timestamp}")
        self.points = pts
        self.ego_translation = (float(self.ego_translation[0]), float(self.ego_translation[1]))

    def __eq__(self, other):
        if not isinstance(other, PointCloudFrame):
            return NotImplemented
        return (
            self.frame_id == other.frame_id
            and self.timestamp == other.timestamp
            and self.ego_translation == other.ego_translation
            and np.array_equal(self.points, other.points)
        )


@dataclass(frozen=True)
class Cluster:
    point_indices: tuple[int, ...]

    def __post_init__(self):
        if not self.point_indices:
            raise ValueError("a cluster needs at least one point")


def euclidean_cluster(frame: PointCloudFrame, cfg: DetectorConfig) -> list[Cluster]:
    """Connected components of the graph joining points at distance <= radius.

    Neighbour search runs over a uniform grid with cell side equal to the
    radius, so only the 27 surrounding cells are scanned per point. Clusters
    smaller than ``cfg.min_cluster_points`` are dropped; the rest are ordered
    by their smallest point index.
    """
    radius = cfg.cluster_radius
    pts = frame.points
    n = len(pts)
    if n == 0:
        return []

    # slightly oversized cells keep boundary pairs in adjacent cells despite rounding
    cell = radius * (1.0 + 1e-9)
    keys = np.floor(pts / cell).astype(np.int64)
    grid: dict[tuple[int, int, int], list[int]] = defaultdict(list)
    for i, k in enumerate(map(tuple, keys)):
        grid[k].append(i)
    offsets = list(product((-1, 0, 1), repeat=3))
    r2 = radius * radius

    label = np.full(n, -1, dtype=np.int64)
    clusters: list[Cluster] = []
    for seed in range(n):
        if label[seed] >= 0:
            continue
        label[seed] = seed
        members = [seed]
        queue = [seed]
        while queue:
            i = queue.pop()
            kx, ky, kz = keys[i]
            cand = [j for dx, dy, dz in offsets for j in grid.get((kx + dx, ky + dy, kz + dz), ())]
            cand = np.fromiter(cand, dtype=np.int64)
            cand = cand[label[cand] < 0]
            if cand.size == 0:
                continue
            d2 = np.sum((pts[cand] - pts[i]) ** 2, axis=1)
            near = cand[d2 <= r2]
            label[near] = seed
            members.extend(near.tolist())
            queue.extend(near.tolist())
        if len(members) >= cfg.min_cluster_points:
            clusters.append(Cluster(tuple(sorted(members))))
    return clusters


def fit_bounding_box(frame: PointCloudFrame, cluster: Cluster, box_id: int = 0) -> BoundingBox3D:
    """Tightest axis-aligned box around the cluster's points."""
    if not cluster.point_indices:
        raise ValueError("cannot fit a box to an empty cluster")
    sub = frame.points[list(cluster.point_indices)]
    return BoundingBox3D(
        tuple(sub.min(axis=0)),
        tuple(sub.max(axis=0)),
        timestamp=frame.timestamp,
        box_id=box_id,
    )
