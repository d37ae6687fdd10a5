"""JSON Lines manifests describing raw stacks and extracted patches"""

import json
import os
from dataclasses import dataclass, fields
from typing import List, Optional

from ..common.errors import InputError

ROLES = ("raw_stack", "patch")


@dataclass
class ManifestEntry:
    path: str
    role: str
    embryo_id: str = ""
    time_min: int = 0
    slice_index: Optional[int] = None
    bbox: Optional[List[int]] = None
    label: Optional[int] = None
    seed_used: Optional[int] = None
    n_slices: Optional[int] = None
    origin_x: Optional[int] = None
    origin_y: Optional[int] = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"Manifest role must be one of {ROLES}, got '{self.role}'")
        if self.bbox is not None:
            self.bbox = [int(v) for v in self.bbox]

    def to_dict(self):
        # Field order is fixed by the dataclass; unset fields are left out
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Unknown manifest fields: {', '.join(sorted(unknown))}")
        return cls(**data)


def dumps_manifest(entries):
    seen = set()
    lines = []
    for entry in entries:
        if entry.path in seen:
            raise ValueError(f"Duplicate manifest path '{entry.path}'")
        seen.add(entry.path)
        lines.append(json.dumps(entry.to_dict(), ensure_ascii=False) + "\n")
    return "".join(lines)


def write_manifest(path, entries):
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(dumps_manifest(entries))


def read_manifest(path, check_files=True):
    """Parse a manifest; entry paths are relative to the manifest's directory"""
    base_dir = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, "r", encoding="utf-8") as file:
            lines = file.readlines()
    except OSError as e:
        raise InputError(f"Cannot read manifest {path}: {e.strerror}") from e

    entries = []
    seen = set()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entry = ManifestEntry.from_dict(json.loads(line))
        except (ValueError, TypeError) as e:
            raise InputError(f"{path}:{number}: invalid manifest entry: {e}") from e
        if entry.path in seen:
            raise InputError(f"{path}:{number}: duplicate path '{entry.path}'")
        seen.add(entry.path)
        if check_files and not os.path.exists(os.path.join(base_dir, entry.path)):
            raise InputError(f"{path}:{number}: referenced file '{entry.path}' does not exist")
        entries.append(entry)
    return entries


def resolve_path(manifest_path, entry):
    return os.path.join(os.path.dirname(os.path.abspath(manifest_path)), entry.path)
