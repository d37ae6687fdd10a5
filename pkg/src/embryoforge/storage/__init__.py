from .storage import Storage
from .storage_file import StorageFile
from .storage_memory import StorageMemory
from .storage_manager import StorageManager
