"""Minimum-cost one-to-one assignment and frame-to-frame box association."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import BoundingBox3D, iou_3d
from .config import DetectorConfig


def hungarian(cost: np.ndarray) -> list[tuple[int, int]]:
    """Solve the rectangular linear assignment problem exactly.

    Every row is assigned when rows <= cols (and every column otherwise).
    Shortest augmenting paths with row/column potentials, O(n^2 m).
    Returns (row, col) pairs sorted by row.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost matrix must be 2-D")
    if cost.size == 0:
        return []
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    transposed = cost.shape[0] > cost.shape[1]
    c = cost.T if transposed else cost
    n, m = c.shape

    # 1-based arrays, column 0 is the virtual source of each augmenting path
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    owner = np.zeros(m + 1, dtype=np.int64)  # owner[j] = row matched to column j
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            free = ~used[1:]
            reduced = c[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[owner[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1

    pairs = [(int(owner[j]) - 1, j - 1) for j in range(1, m + 1) if owner[j] > 0]
    if transposed:
        pairs = [(col, row) for row, col in pairs]
    return sorted(pairs)


@dataclass
class Association:
    matches: list[tuple[int, int]] = field(default_factory=list)
    unmatched_prev: list[int] = field(default_factory=list)
    unmatched_curr: list[int] = field(default_factory=list)


def association_cost(prev: BoundingBox3D, curr: BoundingBox3D, cfg: DetectorConfig) -> tuple[float, bool]:
    """Weighted displacement + (1 - IOU) cost, and whether the pair passes the gate."""
    disp = float(np.linalg.norm(curr.center() - prev.center()))
    cost = cfg.cost_weight_displacement * disp + cfg.cost_weight_iou * (1.0 - iou_3d(prev, curr))
    return cost, disp <= cfg.max_match_displacement


def associate(
    prev: list[BoundingBox3D], curr: list[BoundingBox3D], cfg: DetectorConfig
) -> Association:
    """Match boxes across consecutive frames.

    Pairs farther apart than the gate are forbidden. Among assignments the
    solver first maximises the number of admissible pairs, then minimises
    their total cost; forbidden cells carry a penalty larger than any sum of
    admissible costs, which makes that ordering exact.
    """
    out = Association()
    if not prev or not curr:
        out.unmatched_prev = list(range(len(prev)))
        out.unmatched_curr = list(range(len(curr)))
        return out

    cost = np.zeros((len(prev), len(curr)))
    allowed = np.zeros_like(cost, dtype=bool)
    for i, p in enumerate(prev):
        for j, c in enumerate(curr):
            cost[i, j], allowed[i, j] = association_cost(p, c, cfg)
    penalty = cost[allowed].sum() + 1.0
    solved = hungarian(np.where(allowed, cost, penalty))

    out.matches = [(i, j) for i, j in solved if allowed[i, j]]
    hit_prev = {i for i, _ in out.matches}
    hit_curr = {j for _, j in out.matches}
    out.unmatched_prev = [i for i in range(len(prev)) if i not in hit_prev]
    out.unmatched_curr = [j for j in range(len(curr)) if j not in hit_curr]
    return out
