import re

from vmdg.Models.config_model import StudyMode
from vmdg.solver.maxwell_operator import MaxwellFluxKind
from vmdg.solver.scenarios import scenario_names
from vmdg.solver.vlasov_operator import MappingKind


def is_valid_key(key: str) -> bool:
    if not isinstance(key, str):
        return False
    return re.fullmatch(r"[a-z][a-z0-9_]*", key) is not None


def is_valid_scenario(name: str) -> bool:
    return isinstance(name, str) and name in scenario_names()


def is_valid_int(value: str) -> bool:
    if not isinstance(value, str):
        return False
    return re.fullmatch(r"[+-]?[0-9]+", value.strip()) is not None


def is_valid_int_list(value: str) -> bool:
    """One integer or a comma separated list, e.g. ``16`` or ``16, 16``."""
    if not isinstance(value, str):
        return False
    parts = [p.strip() for p in value.split(",")]
    return bool(parts) and all(is_valid_int(p) for p in parts)


def is_valid_float(value: str) -> bool:
    if not isinstance(value, str):
        return False
    try:
        float(value)
    except ValueError:
        return False
    return True


def is_valid_bool(value: str) -> bool:
    return isinstance(value, str) and value.strip().lower() in {
        "1", "0", "true", "false", "yes", "no", "y", "n", "on", "off"}


def is_valid_flux(value: str) -> bool:
    return value in {kind.value for kind in MaxwellFluxKind}


def is_valid_mapping(value: str) -> bool:
    return value in {kind.value for kind in MappingKind}


def is_valid_mode(value: str) -> bool:
    return value in {mode.value for mode in StudyMode}


def is_valid_float_pair(value: str) -> bool:
    """Two comma separated numbers, e.g. ``2.0, 8.0``."""
    if not isinstance(value, str):
        return False
    parts = value.split(",")
    return len(parts) == 2 and all(is_valid_float(p.strip()) for p in parts)
