"""Headlight energy accounting: wattage x lit hours against an always-on baseline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

# headlight -> (low beam W, high beam W); None where a beam does not exist
HEADLIGHT_WATTS: dict[str, tuple[Optional[float], float]] = {
    "Goreit Flashlight": (None, 1.5),
    "LED": (15.0, 25.0),
    "Halogen": (55.0, 65.0),
}

# Reference drive: a 22 minute night drive, written as 0.366 h.
DRIVE_HOURS = 0.366
# scenario -> lit hours, as rounded for the reference drive:
#   worst   lamp on for the whole drive
#   average about 21% of objects labelled dangerous: 4 min 37 s, written as 0.077 h
#   best    47 isolated dangerous objects x 3 s timer = 141 s, written as 0.039 h
ENERGY_PRESETS: dict[str, float] = {
    "worst": DRIVE_HOURS,
    "average": 0.077,
    "best": 0.039,
}
BEST_CASE_EVENTS = 47
BEST_CASE_TAU_S = 3.0


@dataclass(frozen=True)
class EnergyModel:
    watts: dict[str, tuple[Optional[float], float]] = field(default_factory=lambda: dict(HEADLIGHT_WATTS))

    def __post_init__(self):
        for name, (low, high) in self.watts.items():
            if not high > 0 or (low is not None and not low > 0):
                raise ValueError(f"{name}: wattages must be positive")

    def wattage(self, headlight: str, beam: str) -> Optional[float]:
        low, high = self.watts[headlight]
        if beam == "high":
            return high
        if beam == "low":
            return low
        raise ValueError(f"beam must be 'high' or 'low', got {beam!r}")


@dataclass(frozen=True)
class EnergyRow:
    headlight: str
    watts: float
    used_wh: float
    baseline_wh: float

    @property
    def saved_wh(self) -> float:
        return self.baseline_wh - self.used_wh


@dataclass(frozen=True)
class EnergyReport:
    beam: str
    on_time_s: float
    total_time_s: float
    rows: list[EnergyRow]

    @property
    def fraction_on(self) -> float:
        return self.on_time_s / self.total_time_s if self.total_time_s else 0.0

    @property
    def fraction_saved(self) -> float:
        return 1.0 - self.fraction_on if self.total_time_s else 0.0

    def row(self, headlight: str) -> EnergyRow:
        return next(r for r in self.rows if r.headlight == headlight)


def watt_hours(watts: float, seconds: float) -> float:
    return watts * seconds / 3600.0


def energy_report(on_time_s: float, total_time_s: float, model: Optional[EnergyModel] = None,
                  beam: str = "high") -> EnergyReport:
    """Energy used while lit versus keeping the lamp on for the whole time.

    Headlights without the requested beam are left out.
    """
    if on_time_s < 0 or total_time_s < 0:
        raise ValueError("times must be non-negative")
    if on_time_s > total_time_s:
        raise ValueError(f"on time {on_time_s} s exceeds total time {total_time_s} s")
    model = model or EnergyModel()
    rows = []
    for name in model.watts:
        w = model.wattage(name, beam)
        if w is None:
            continue
        rows.append(EnergyRow(name, w, watt_hours(w, on_time_s), watt_hours(w, total_time_s)))
    return EnergyReport(beam, on_time_s, total_time_s, rows)


def preset_report(name: str, model: Optional[EnergyModel] = None, beam: str = "high") -> EnergyReport:
    if name not in ENERGY_PRESETS:
        raise ValueError(f"unknown energy scenario {name!r} (choose from {', '.join(ENERGY_PRESETS)})")
    return energy_report(ENERGY_PRESETS[name] * 3600.0, DRIVE_HOURS * 3600.0, model, beam)
