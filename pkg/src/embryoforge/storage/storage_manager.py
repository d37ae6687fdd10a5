"""Create and hold the named storages of a run"""

from ..common.log import log
from .storage_file import StorageFile
from .storage_memory import StorageMemory

STORAGE_TYPES = {
    "file": StorageFile,
    "memory": StorageMemory,
}


class StorageManager:
    """Builds one handler per entry of the ``storage`` config list:

    storage:
      - name: checkpoints
        storage_type: file
        storage_config:
          directory: /data/checkpoints
    """

    def __init__(self, storage_config: list):
        self.storage_handlers = {}
        for storage in storage_config or []:
            name = storage.get("name")
            if not name:
                raise ValueError("Every storage entry needs a 'name'")
            if name in self.storage_handlers:
                raise ValueError(f"Storage '{name}' is configured twice")
            self.storage_handlers[name] = self.create_storage(storage)
            log.debug("Created %s storage '%s'", storage.get("storage_type"), name)

    def get_storage_handler(self, storage_name: str):
        """The storage called storage_name, or None"""
        return self.storage_handlers.get(storage_name)

    @staticmethod
    def create_storage(config: dict):
        storage_type = config.get("storage_type")
        storage_class = STORAGE_TYPES.get(storage_type)
        if storage_class is None:
            raise ValueError(
                f"Unsupported storage type: {storage_type} (known: {', '.join(sorted(STORAGE_TYPES))})"
            )
        return storage_class(config.get("storage_config") or {})
