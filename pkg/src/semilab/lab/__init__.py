"""Experiment front end: configs, presets, checks, reports and plots."""

from .config import CHECKS, ConfigError, ExperimentConfig, load, loads
from .presets import PRESETS, list_presets, preset_config
from .report import REPORT_SCHEMA, ExperimentReport, run_config

__all__ = ["CHECKS", "ConfigError", "ExperimentConfig", "load", "loads", "PRESETS", "list_presets",
           "preset_config", "REPORT_SCHEMA", "ExperimentReport", "run_config"]
