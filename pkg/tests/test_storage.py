"""This file contains tests for memory and file storage"""

import os
import sys

import pytest

sys.path.append("src")

from utils_for_test_files import create_app  # pylint: disable=wrong-import-position

from embryoforge.storage.storage_file import StorageFile  # pylint: disable=wrong-import-position
from embryoforge.storage.storage_manager import StorageManager  # pylint: disable=wrong-import-position
from embryoforge.storage.storage_memory import StorageMemory  # pylint: disable=wrong-import-position


def test_memory_storage():
    """Test the memory storage"""
    storage = StorageMemory({})
    storage.put("generator_last_good.ckpt", b"first")
    storage.put("generator_last_good.ckpt", b"second")
    assert storage.get("generator_last_good.ckpt") == b"second"
    assert storage.get("missing") is None
    assert storage.list() == ["generator_last_good.ckpt"]
    assert storage.location("generator_last_good.ckpt") == "memory:generator_last_good.ckpt"
    storage.delete("generator_last_good.ckpt")
    assert storage.list() == []


def test_file_storage(tmp_path):
    """Test the file storage"""
    directory = str(tmp_path / "last_good")
    storage = StorageFile({"directory": directory})
    assert os.path.isdir(directory)
    storage.put("critic_last_good.ckpt", b"\x00\x01")
    storage.put("critic_last_good.ckpt", b"\x02")
    assert storage.get("critic_last_good.ckpt") == b"\x02"
    assert storage.list() == ["critic_last_good.ckpt"]
    assert storage.location("critic_last_good.ckpt") == os.path.join(directory, "critic_last_good.ckpt")
    assert storage.get("other.ckpt") is None
    storage.delete("critic_last_good.ckpt")
    assert storage.list() == []


def test_file_storage_rejects_path_keys(tmp_path):
    storage = StorageFile({"directory": str(tmp_path)})
    with pytest.raises(ValueError):
        storage.put("../escape", b"")
    with pytest.raises(ValueError):
        StorageFile({})


def test_storage_manager_from_config(tmp_path):
    """The app builds one handler per storage entry"""
    config_yaml = f"""
instance_name: test_instance
storage:
  - name: memory
    storage_type: memory
  - name: checkpoints
    storage_type: file
    storage_config:
      directory: {tmp_path / "ckpt"}
"""
    app = create_app(config_yaml)
    try:
        assert isinstance(app.storage_manager.get_storage_handler("memory"), StorageMemory)
        assert isinstance(app.storage_manager.get_storage_handler("checkpoints"), StorageFile)
        assert app.storage_manager.get_storage_handler("nothing") is None
    finally:
        app.stop()


def test_storage_manager_errors():
    with pytest.raises(ValueError):
        StorageManager([{"name": "s3", "storage_type": "s3"}])
    with pytest.raises(ValueError):
        StorageManager([{"storage_type": "memory"}])
    with pytest.raises(ValueError) as excinfo:
        StorageManager([{"name": "a", "storage_type": "memory"}, {"name": "a", "storage_type": "memory"}])
    assert "twice" in str(excinfo.value)
