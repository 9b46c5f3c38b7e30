"""Scenario generation, file I/O, playback, scoring and energy accounting."""

from .energy import ENERGY_PRESETS, EnergyModel, EnergyReport, energy_report, preset_report
from .io import ScenarioFormatError, ScenarioVersionError, load_scenario, loads_scenario, dumps_scenario, save_scenario
from .metrics import ConfusionMatrix, MetricsReport, compute_metrics, score_trace
from .pipeline import FrameResult, ScenarioTrace, run_pipeline, write_trace
from .scenario import (
    PRESETS,
    ActorScript,
    FrameTruth,
    Scenario,
    ScenarioSpecError,
    TruthObject,
    generate_scenario,
    make_preset,
)

__all__ = [
    "ENERGY_PRESETS",
    "PRESETS",
    "ActorScript",
    "ConfusionMatrix",
    "EnergyModel",
    "EnergyReport",
    "FrameResult",
    "FrameTruth",
    "MetricsReport",
    "Scenario",
    "ScenarioFormatError",
    "ScenarioSpecError",
    "ScenarioTrace",
    "ScenarioVersionError",
    "TruthObject",
    "compute_metrics",
    "dumps_scenario",
    "energy_report",
    "generate_scenario",
    "load_scenario",
    "loads_scenario",
    "make_preset",
    "preset_report",
    "run_pipeline",
    "save_scenario",
    "score_trace",
    "write_trace",
]
