"""Scenario configuration, figure presets and parameter sweeps."""

from .config import ScenarioConfig, Series, SweepSpec, load_config, parse_config, to_toml
from .presets import PRESET_NAMES, preset
from .sweep import ResultRow, RwaWarning, SweepResult, rows_to_csv, run_point, run_sweep

__all__ = [
    "PRESET_NAMES",
    "ResultRow",
    "RwaWarning",
    "ScenarioConfig",
    "Series",
    "SweepResult",
    "SweepSpec",
    "load_config",
    "parse_config",
    "preset",
    "rows_to_csv",
    "run_point",
    "run_sweep",
    "to_toml",
]
