"""Episode-level confusion matrix and the derived detection metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .pipeline import ScenarioTrace
from .scenario import FrameTruth


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class MetricsReport:
    """Ratios in [0, 1]; None marks a metric whose denominator is zero."""

    precision: Optional[float]
    recall: Optional[float]
    accuracy: Optional[float]
    f1: Optional[float]

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "accuracy": self.accuracy, "f1": self.f1}


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    return MetricsReport(
        precision=_ratio(cm.tp, cm.tp + cm.fp),
        recall=_ratio(cm.tp, cm.tp + cm.fn),
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        f1=_ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn),
    )


def score_trace(trace: ScenarioTrace, ground_truth: Sequence[FrameTruth], matching_radius: float = 1.0) -> ConfusionMatrix:
    """Count outcomes per episode: one ground-truth object in one scenario.

    Each track is matched to the nearest truth object within
    ``matching_radius`` (planar distance) in the same frame.

    * truly dangerous episode: TP if a dangerous verdict ever landed on it
      while it was dangerous, else FN;
    * never-dangerous episode: FP if it ever drew a dangerous verdict,
      TN if it was tracked without one; untracked ones are not scored;
    * a dangerous verdict matching no truth object is an FP of its own,
      counted once per track.
    """
    if not matching_radius > 0:
        raise ValueError("matching_radius must be positive")
    truth_by_frame = {ft.frame_id: ft for ft in ground_truth}

    ever_dangerous: dict[str, bool] = {}
    tracked: set[str] = set()
    hit: set[str] = set()
    false_alarm: set[str] = set()
    phantom: set[int] = set()

    for fr in trace.frames:
        objects = truth_by_frame[fr.frame_id].objects if fr.frame_id in truth_by_frame else []
        for obj in objects:
            ever_dangerous[obj.label] = ever_dangerous.get(obj.label, False) or obj.dangerous
        for track, verdict in zip(fr.tracks, fr.verdicts):
            best, best_d = None, matching_radius
            for obj in objects:
                d = math.hypot(track.position[0] - obj.pos[0], track.position[1] - obj.pos[1])
                if d <= best_d:
                    best, best_d = obj, d
            if best is None:
                if verdict.dangerous:
                    phantom.add(track.track_id)
                continue
            tracked.add(best.label)
            if verdict.dangerous:
                (hit if best.dangerous else false_alarm).add(best.label)

    tp = fp = fn = tn = 0
    for label, dangerous in ever_dangerous.items():
        if dangerous:
            if label in hit:
                tp += 1
            else:
                fn += 1
        elif label in false_alarm:
            fp += 1
        elif label in tracked:
            tn += 1
    return ConfusionMatrix(tp, fp + len(phantom), fn, tn)
