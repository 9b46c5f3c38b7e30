"""Monte Carlo estimate of how often a random object is labelled dangerous.

Synthetic objects draw distance and speed from unif{1, n} and yaw from
unif{1, 360}; the reaction-time factor is ``alpha``. Two references are
provided for the simulated fraction: the closed form valid for alpha = 1, and
an exact count over every (distance, speed, yaw) combination.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .danger import DangerConfig, danger_mask

FACING_SPAN_DEG = 150
BRUTE_FORCE_MAX_N = 10_000

# Facing windows written out independently of the danger module, so the exact
# count below is a separate route to the same probability.
_ORACLE_WINDOWS = ((195, 345), (105, 255), (15, 165))


@dataclass(frozen=True)
class McConfig:
    n: int = 60
    alpha: float = 1.0
    max_load: int = 100
    num_trials: int = 1000
    seed: int = 0
    vehicle_width_w: float = 2.0

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be an integer >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.max_load < 1:
            raise ValueError("max_load must be >= 1")
        if self.num_trials < 1:
            raise ValueError("num_trials must be >= 1")


@dataclass
class McResult:
    averages: list[float]
    grand_mean: float
    config: Optional[McConfig] = None
    pooled_fraction: float = float("nan")  # dangerous boxes / all boxes
    total_boxes: int = 0
    loads: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class SyntheticBox:
    distance: int
    speed: int
    yaw: int
    position: tuple[float, float]


def generate_boxes(rng: np.random.Generator, count: int, n: int) -> dict[str, np.ndarray]:
    """Draw ``count`` objects at once.

    Each object sits on the frontal half circle of radius ``distance`` at a
    uniformly random bearing; every section's facing window is 150 degrees
    wide, so where it lands does not change the danger probability.
    """
    distance = rng.integers(1, n, size=count, endpoint=True)
    speed = rng.integers(1, n, size=count, endpoint=True)
    yaw = rng.integers(1, 360, size=count, endpoint=True)
    bearing = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=count)
    pos = np.column_stack([distance * np.cos(bearing), distance * np.sin(bearing)])
    return {"distance": distance, "speed": speed, "yaw": yaw, "position": pos}


def generate_random_box(rng: np.random.Generator, n: int) -> SyntheticBox:
    if n < 1:
        raise ValueError("n must be >= 1")
    b = generate_boxes(rng, 1, n)
    return SyntheticBox(int(b["distance"][0]), int(b["speed"][0]), int(b["yaw"][0]),
                        (float(b["position"][0, 0]), float(b["position"][0, 1])))


def p_e1_closed_form(n: int) -> float:
    """P(d <= s) for d, s ~ unif{1, n}: 1/2 + 1/(2n)."""
    return 0.5 + 1.0 / (2 * n)


def p_e1_summation(n: int) -> float:
    return math.fsum(i / (n * n) for i in range(1, n + 1))


def analytic_p_danger(n: int, alpha: float = 1.0) -> float:
    """(150/360) * (1/2 + 1/(2n)); only valid for alpha = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha != 1:
        raise ValueError("the closed form assumes alpha == 1; use brute_force_p_danger for other values")
    return FACING_SPAN_DEG / 360 * p_e1_closed_form(n)


def window_yaw_counts() -> list[int]:
    """How many yaws in {1, ..., 360} (360 taken as 0) fall in each window."""
    yaws = [y % 360 for y in range(1, 361)]
    return [sum(lo <= y <= hi for y in yaws) for lo, hi in _ORACLE_WINDOWS]


def brute_force_p_danger_exact(n: int, alpha: float = 1.0) -> Fraction:
    """Exact probability as a fraction by counting every combination.

    For each speed s the admissible distances are 1..min(n, floor(alpha*s)),
    which counts the (d, s) pairs exactly; the yaw count is the same for every
    section, so it factors out.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"n={n} too large for exhaustive enumeration (max {BRUTE_FORCE_MAX_N})")
    a = Fraction(alpha)
    pairs = sum(min(n, math.floor(a * s)) for s in range(1, n + 1))
    counts = window_yaw_counts()
    if len(set(counts)) != 1:
        raise RuntimeError(f"facing windows differ in size: {counts}")
    return Fraction(pairs, n * n) * Fraction(counts[0], 360)


def brute_force_p_danger(n: int, alpha: float = 1.0) -> float:
    return float(brute_force_p_danger_exact(n, alpha))


DangerFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def default_detector(cfg: McConfig) -> DangerFn:
    dcfg = DangerConfig(reaction_time_s=cfg.alpha, vehicle_width_w=cfg.vehicle_width_w)
    return lambda pos, speed, yaw: danger_mask(pos, speed, yaw, dcfg)


def trial_rng(seed: int, load: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(load, trial)))


def _run_load(cfg: McConfig, load: int, detector: Optional[DangerFn] = None) -> tuple[float, int]:
    """Mean dangerous fraction over ``num_trials`` trials of ``load`` boxes."""
    detect = detector or default_detector(cfg)
    total = 0.0
    hits = 0
    for trial in range(cfg.num_trials):
        b = generate_boxes(trial_rng(cfg.seed, load, trial), load, cfg.n)
        mask = detect(b["position"], b["speed"].astype(float), b["yaw"].astype(float) % 360.0)
        k = int(np.count_nonzero(mask))
        hits += k
        total += k / load
    return total / cfg.num_trials, hits


def _run_load_args(args):
    return _run_load(*args)


def run_simulation(cfg: McConfig, detector: Optional[DangerFn] = None, workers: int = 1) -> McResult:
    """Sweep load sizes 1..max_load, ``num_trials`` trials each.

    Every trial seeds its own generator from (seed, load, trial), so results
    do not depend on ``workers``. A custom ``detector`` forces serial runs.
    """
    loads = list(range(1, cfg.max_load + 1))
    if workers > 1 and detector is None:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_load_args, [(cfg, load) for load in loads]))
    else:
        results = [_run_load(cfg, load, detector) for load in loads]
    averages = [avg for avg, _ in results]
    total_boxes = cfg.num_trials * sum(loads)
    return McResult(
        averages=averages,
        grand_mean=float(np.mean(averages)),
        config=cfg,
        pooled_fraction=sum(h for _, h in results) / total_boxes,
        total_boxes=total_boxes,
        loads=loads,
    )


def grand_mean_sigma(p: float, cfg: McConfig) -> float:
    """Standard deviation of the grand mean when each box is dangerous w.p. ``p``."""
    var = sum(p * (1 - p) / (load * cfg.num_trials) for load in range(1, cfg.max_load + 1))
    return math.sqrt(var) / cfg.max_load


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    ci_low: float
    ci_high: float

    @property
    def contains_zero(self) -> bool:
        return self.ci_low <= 0.0 <= self.ci_high


def load_slope(result: McResult, confidence: float = 0.95) -> SlopeFit:
    """Least-squares slope of per-load averages against load size, with a t interval."""
    loads = result.loads or list(range(1, len(result.averages) + 1))
    if len(loads) < 3:
        raise ValueError("need at least three load sizes to fit a slope with an interval")
    fit = stats.linregress(loads, result.averages)
    half = stats.t.ppf(0.5 + confidence / 2, len(loads) - 2) * fit.stderr
    slope, half = float(fit.slope), float(half)
    return SlopeFit(slope, float(fit.intercept), slope - half, slope + half)
