"""Randomized checks of the class-norm axioms and the operator-level inequalities."""
from .config import (CHECK_BUDGET, FAMILIES, CheckConfig, CheckReport, Preset, PropertyId, engine_grid,
                     parse_property, preset_grid)
from .mutants import MUTANTS
from .runner import check, replay, run_suite

__all__ = ["CHECK_BUDGET", "FAMILIES", "CheckConfig", "CheckReport", "MUTANTS", "Preset", "PropertyId",
           "check", "engine_grid", "parse_property", "preset_grid", "replay", "run_suite"]
