"""Typed config parameters shared by commands and flow components.

A parameter declaration is a dict with ``name`` and optionally ``type``,
``default``, ``required`` and ``choices``."""

from .errors import ConfigError


def _to_bool(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "yes", "on", "1"):
        return True
    if isinstance(value, str) and value.lower() in ("false", "no", "off", "0"):
        return False
    if isinstance(value, int):
        return bool(value)
    raise ValueError(f"'{value}' is not a boolean")


def _to_float_list(value):
    if isinstance(value, str):
        value = [part for part in value.replace(",", " ").split() if part]
    return [float(v) for v in value]


CONVERTERS = {
    "int": int,
    "float": float,
    "string": str,
    "path": str,
    "bool": _to_bool,
    "float_list": _to_float_list,
}


def coerce_parameter(param, value):
    """Convert a config value to the parameter's declared type"""
    if value is None:
        return None
    kind = param.get("type", "string")
    try:
        converted = CONVERTERS[kind](value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Config parameter {param['name']}: expected {kind}, got {value!r}") from e
    if kind == "int" and isinstance(value, float) and value != int(value):
        raise ConfigError(f"Config parameter {param['name']}: expected int, got {value!r}")
    choices = param.get("choices")
    if choices and converted not in choices:
        raise ConfigError(f"Config parameter {param['name']} must be one of {choices}, got {converted!r}")
    return converted
