"""Flat config files + CLI overrides -> validated RunConfig / StudyConfig."""
from typing import Dict, Optional

from pydantic import ValidationError

from vmdg.Models.config_model import RunConfig, StudyConfig
from vmdg.solver.errors import ConfigError, UnknownScenarioError
from vmdg.solver.scenarios import lookup
from vmdg.storage_utils import load_config_file

from .logging_config import log_event
from .validation.validation import (is_valid_bool, is_valid_float, is_valid_float_pair,
                                    is_valid_flux, is_valid_int, is_valid_int_list, is_valid_key,
                                    is_valid_mapping, is_valid_mode, is_valid_scenario)

RUN_KEYS = ("scenario", "k", "n_x", "n_v", "cfl", "t_final", "flux", "mapping",
            "observer_stride", "output", "seed", "adaptive_dt", "trials", "growth_window")
STUDY_KEYS = ("levels", "mode")
KNOWN_KEYS = RUN_KEYS + STUDY_KEYS

_TRUE = {"1", "true", "yes", "y", "on"}


def _reject(message: str, key: str = None):
    log_event("WARNING", event="config_rejected", message=message, key=key)
    raise ConfigError(message, key)


def _parse_value(key: str, raw):
    if not isinstance(raw, str):
        return raw
    value = raw.strip()
    if key in ("k", "n_x", "observer_stride", "seed", "levels", "trials"):
        if not is_valid_int(value):
            _reject(f"{key} must be an integer, got {raw!r}", key)
        return int(value)
    if key == "n_v":
        if not is_valid_int_list(value):
            _reject(f"n_v must be an integer or a comma separated list, got {raw!r}", key)
        return [int(p) for p in value.split(",")]
    if key in ("cfl", "t_final"):
        if not is_valid_float(value):
            _reject(f"{key} must be a number, got {raw!r}", key)
        return float(value)
    if key == "growth_window":
        if not is_valid_float_pair(value):
            _reject(f"growth_window must be two comma separated times, got {raw!r}", key)
        return tuple(float(p) for p in value.split(","))
    if key == "adaptive_dt":
        if not is_valid_bool(value):
            _reject(f"adaptive_dt must be a boolean, got {raw!r}", key)
        return value.lower() in _TRUE
    if key == "scenario" and not is_valid_scenario(value):
        _reject(f"Unknown scenario: {value!r}", key)
    if key == "flux" and not is_valid_flux(value):
        _reject(f"Unknown flux kind: {value!r}", key)
    if key == "mapping" and not is_valid_mapping(value):
        _reject(f"Unknown velocity mapping: {value!r}", key)
    if key == "mode" and not is_valid_mode(value):
        _reject(f"Unknown study mode: {value!r}", key)
    return value


def merge_settings(file_path: Optional[str] = None, overrides: Dict = None) -> Dict:
    """File values first, then non-None overrides; every key is checked and parsed."""
    raw = dict(load_config_file(file_path)) if file_path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    settings = {}
    for key, value in raw.items():
        if not is_valid_key(key) or key not in KNOWN_KEYS:
            _reject(f"Unknown config key: {key!r}", key)
        settings[key] = _parse_value(key, value)
    return settings


def _build(model, values: Dict):
    try:
        return model(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = str(first["loc"][0]) if first.get("loc") else None
        _reject(f"Invalid value for {key}: {first['msg']}", key)


def resolve_run_config(config: RunConfig) -> RunConfig:
    """Fill resolutions, final time, mapping and domains from the scenario catalog."""
    try:
        scenario = lookup(config.scenario)
    except UnknownScenarioError as exc:
        _reject(str(exc), "scenario")
    n_v = list(config.n_v) if config.n_v is not None else list(scenario.n_v)
    if len(n_v) == 1 and scenario.d_v == 2:
        n_v = n_v * 2
    if len(n_v) != scenario.d_v:
        _reject(f"Scenario {scenario.name!r} has {scenario.d_v} velocity axes, "
                f"got {len(n_v)} n_v entries", "n_v")
    mapping = config.mapping if config.mapping is not None else scenario.mapping
    mapping_name = str(getattr(mapping, "value", mapping))
    if mapping_name != scenario.mapping:
        _reject(f"Scenario {scenario.name!r} is defined for the {scenario.mapping} mapping; "
                f"use its {mapping_name} variant instead", "mapping")
    update = {
        "n_x": config.n_x if config.n_x is not None else scenario.n_x,
        "n_v": n_v,
        "t_final": config.t_final if config.t_final is not None else scenario.t_final,
        "mapping": mapping,
        "x_domain": config.x_domain or scenario.x_domain,
        "v_domain": config.v_domain or scenario.v_domain,
    }
    resolved = _build(RunConfig, {**config.model_dump(), **update})
    if not resolved.in_convergence_regime:
        log_event("WARNING", event="low_degree_warning",
                  message="k is below ceil((d_x + 1) / 2); convergence rates are not guaranteed",
                  k=resolved.k)
    return resolved


def load_run_config(file_path: Optional[str] = None, overrides: Dict = None) -> RunConfig:
    settings = merge_settings(file_path, overrides)
    run_values = {k: v for k, v in settings.items() if k in RUN_KEYS}
    return resolve_run_config(_build(RunConfig, run_values))


def load_study_config(file_path: Optional[str] = None, overrides: Dict = None) -> StudyConfig:
    settings = merge_settings(file_path, overrides)
    run_values = {k: v for k, v in settings.items() if k in RUN_KEYS}
    study_values = {k: v for k, v in settings.items() if k in STUDY_KEYS}
    base = resolve_run_config(_build(RunConfig, run_values))
    return _build(StudyConfig, {"base": base, **study_values})
