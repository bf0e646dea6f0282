"""Sweeps, figure presets, validation harness and the command-line interface."""

from .config import load_setup, load_sweep, parse_number
from .figures import PRESETS, FigurePreset, figure_curves, get_preset, write_figure
from .sweep import AXES, QUANTITIES, Axis, SweepSpec, SweepTable, run_sweep
from .validation import ValidationReport, random_setups, validate

__all__ = [
    "AXES", "QUANTITIES", "Axis", "SweepSpec", "SweepTable", "run_sweep",
    "PRESETS", "FigurePreset", "figure_curves", "get_preset", "write_figure",
    "ValidationReport", "random_setups", "validate",
    "load_setup", "load_sweep", "parse_number",
]
