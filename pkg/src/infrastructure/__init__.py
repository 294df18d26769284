"""Infrastructure components: process-wide logger and singleton support."""

from .logger import logger, Logger
from .singleton import SingletonMeta

__all__ = ["logger", "Logger", "SingletonMeta"]
