from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DetectorConfig:
    """Tuning constants for clustering, association and filtering.

    Defaults are chosen for pedestrian-sized blobs at 10 Hz; none of them are
    pinned down by the detection method itself.
    """

    cluster_radius: float = 0.5
    min_cluster_points: int = 4
    max_match_displacement: float = 3.0
    cost_weight_displacement: float = 1.0
    cost_weight_iou: float = 1.0
    process_noise: float = 0.1
    measurement_noise: float = 0.5
    velocity_measurement_noise: float = 1.0
    # +1 adds the vehicle's own translation to object displacement, -1 subtracts it
    ego_sign: float = 1.0

    def __post_init__(self):
        if not self.cluster_radius > 0:
            raise ValueError("cluster_radius must be > 0")
        if self.min_cluster_points < 1:
            raise ValueError("min_cluster_points must be >= 1")
        if not self.max_match_displacement > 0:
            raise ValueError("max_match_displacement must be > 0")
        if self.cost_weight_displacement < 0 or self.cost_weight_iou < 0:
            raise ValueError("cost weights must be non-negative")
        if self.cost_weight_displacement == 0 and self.cost_weight_iou == 0:
            raise ValueError("cost weights cannot both be zero")
        if self.process_noise < 0:
            raise ValueError("process_noise must be >= 0")
        for name in ("measurement_noise", "velocity_measurement_noise"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be positive and finite")
        if self.ego_sign not in (1.0, -1.0):
            raise ValueError("ego_sign must be +1 or -1")
