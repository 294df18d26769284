import threading
from typing import Any, Dict


class SingletonMeta(type):
    """One shared instance per class, created lazily under a lock.

    mpire workers import the package afresh, so each worker process gets its
    own instance; within a process every call returns the same object.
    """

    _instances: Dict[type, Any] = {}
    _lock = threading.Lock()

    def __call__(cls, *args, **kwargs):
        instance = SingletonMeta._instances.get(cls)
        if instance is None:
            with SingletonMeta._lock:
                instance = SingletonMeta._instances.get(cls)
                if instance is None:
                    instance = super().__call__(*args, **kwargs)
                    SingletonMeta._instances[cls] = instance
        return instance

    def has_instance(cls) -> bool:
        return cls in SingletonMeta._instances

    def reset_instance(cls) -> None:
        """Forget the shared instance; the next call builds a new one."""
        with SingletonMeta._lock:
            SingletonMeta._instances.pop(cls, None)
