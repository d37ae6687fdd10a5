"""File storage implementation for the storage interface."""

import os
import re

from .storage import Storage

info = {
    "class_name": "StorageFile",
    "description": "Directory storage: every key is one binary file in the directory.",
    "config_parameters": [
        {
            "name": "directory",
            "required": True,
            "description": "The directory to keep the files in (created if missing)",
            "type": "string",
        },
    ],
}

_KEY_PATTERN = re.compile(r"^[A-Za-z0-9_.\-]+$")


class StorageFile(Storage):
    """File storage class. Writes go through a temporary file and a rename so
    a reader never sees a half written value."""

    def __init__(self, config: dict):
        """Initialize the file storage class."""
        if not config.get("directory"):
            raise ValueError("File storage requires a 'directory' in its storage_config")
        self.directory = config["directory"]
        os.makedirs(self.directory, exist_ok=True)

    def _path(self, key: str) -> str:
        if not _KEY_PATTERN.match(key):
            raise ValueError(f"Invalid storage key '{key}'")
        return os.path.join(self.directory, key)

    def put(self, key: str, value: bytes):
        """Put a value into the file storage."""
        path = self._path(key)
        temp_path = path + ".tmp"
        with open(temp_path, "wb") as file:
            file.write(value)
        os.replace(temp_path, path)

    def get(self, key: str) -> bytes:
        """Get a value from the file storage"""
        path = self._path(key)
        if not os.path.exists(path):
            return None
        with open(path, "rb") as file:
            return file.read()

    def delete(self, key: str):
        """Delete a value from the file storage."""
        os.remove(self._path(key))

    def list(self) -> list:
        """List all keys in the file storage."""
        return sorted(
            name
            for name in os.listdir(self.directory)
            if not name.endswith(".tmp") and os.path.isfile(os.path.join(self.directory, name))
        )

    def location(self, key: str) -> str:
        return self._path(key)
