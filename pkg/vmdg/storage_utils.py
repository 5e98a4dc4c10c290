# storage_utils.py
import csv
import json
import math
import os

from vmdg.solver.errors import ConfigError


def format_value(value):
    """Floats with 17 significant digits; None becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def _ensure_parent(filename):
    parent = os.path.dirname(os.path.abspath(filename))
    os.makedirs(parent, exist_ok=True)


def write_json(filename, data):
    _ensure_parent(filename)
    with open(filename, "w", encoding="utf-8") as file:
        json.dump(data, file, default=str, indent=2, sort_keys=True)


def load_csv(filename):
    try:
        with open(filename, "r", newline="", encoding="utf-8") as file:
            reader = csv.reader(file)
            return [row for row in reader]
    except FileNotFoundError:
        return []


def write_csv(filename, header, rows):
    _ensure_parent(filename)
    with open(filename, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def load_config_file(filename):
    """Flat ``key = value`` lines; ``#`` starts a comment. Returns raw string values."""
    try:
        with open(filename, "r", encoding="utf-8") as file:
            lines = file.readlines()
    except FileNotFoundError:
        raise ConfigError(f"Config file {filename} not found") from None
    values = {}
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{filename}:{number}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{filename}:{number}: empty key")
        values[key] = value
    return values
