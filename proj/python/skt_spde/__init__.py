"""Python bindings for the skt-spde core."""

import csv
import io
import json

from ._core import (
    ConditionReport,
    ConfigError,
    ModelParams,
    ShapeError,
    SpectralBasis,
    __version__,
    alpha_detailed_balance,
    alpha_self_diffusion,
    check_conditions,
    drift_apply,
    eval_diffusion_matrix,
    eval_truncated_matrix,
    quadratic_form_gap,
    run,
    solve_detailed_balance,
    stampacchia_f,
)
from . import _core

STATS_COLUMNS = ("t", "species", "field", "mean", "var", "stderr", "p_moment")


def run_ensemble(config, overrides=()):
    """Runs a config and returns the stats.csv rows as dicts."""
    text = _core.ensemble_csv(str(config), list(overrides))
    return list(csv.DictReader(io.StringIO(text)))


def run_study(name, config, overrides=()):
    return json.loads(_core.study_json(name, str(config), list(overrides)))


__all__ = [
    "ConditionReport",
    "ConfigError",
    "ModelParams",
    "STATS_COLUMNS",
    "ShapeError",
    "SpectralBasis",
    "__version__",
    "alpha_detailed_balance",
    "alpha_self_diffusion",
    "check_conditions",
    "drift_apply",
    "eval_diffusion_matrix",
    "eval_truncated_matrix",
    "quadratic_form_gap",
    "run",
    "run_ensemble",
    "run_study",
    "solve_detailed_balance",
    "stampacchia_f",
]
