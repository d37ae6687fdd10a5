"""Random utility functions"""

import importlib
import math
import os

import numpy as np

from .log import log

THREADS_ENV_VAR = "EMBRYOFORGE_THREADS"


def import_module(name):
    """Import a module by name, also trying the package's known prefixes"""
    try:
        return importlib.import_module(name)
    except ModuleNotFoundError as exc:
        # Short names like "median_filter" are looked up in the known packages
        if "." not in name:
            for prefix in [
                "embryoforge.components",
                "embryoforge.components.preprocess",
            ]:
                full_name = f"{prefix}.{name}"
                try:
                    return importlib.import_module(full_name)
                except ModuleNotFoundError:
                    pass
                except Exception as e:
                    raise ImportError(f"Module load error for {full_name}: {e}") from e
        raise ModuleNotFoundError(f"Module '{name}' not found") from exc


def resolve_thread_count(requested=None):
    """Number of worker threads: the request (or CPU count), capped by EMBRYOFORGE_THREADS"""
    count = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV_VAR)
    if cap:
        try:
            count = min(count, int(cap))
        except ValueError:
            log.warning("Ignoring non-integer %s=%s", THREADS_ENV_VAR, cap)
    return max(1, int(count))


def parse_slice_range(text):
    """Parse "lo:hi" (inclusive on both ends) into a tuple of ints"""
    if isinstance(text, (list, tuple)):
        lo, hi = text
        return int(lo), int(hi)
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ValueError(f"Slice range must look like 'lo:hi', got '{text}'")
    lo, hi = int(parts[0]), int(parts[1])
    if lo > hi:
        raise ValueError(f"Slice range '{text}' is empty")
    return lo, hi


def round_half_away(values):
    """Round to the nearest integer, ties away from zero"""
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def max_intensity(bit_depth):
    return (1 << int(bit_depth)) - 1


def ensure_directory(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path


def is_power_of_two(value):
    return value > 0 and math.log2(value).is_integer()
