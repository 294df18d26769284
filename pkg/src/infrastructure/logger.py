import logging
import coloredlogs
from .singleton import SingletonMeta

LOGGER_NAME = "bishop-discs"

# mpire workers log from child processes, so process fields stay in the format
LOG_FORMAT = (
    "%(asctime)s %(processName)s[%(process)d] %(name)s %(levelname)s: %(message)s"
)
FIELD_STYLES = {
    "asctime": {"color": "cyan"},
    "processName": {"color": "magenta", "bold": True},
    "process": {"color": "magenta"},
    "name": {"color": "green", "bold": True},
    "levelname": {"color": "white", "bold": True},
}
LEVEL_STYLES = {
    "debug": {"color": "white"},
    "info": {"color": "cyan", "bold": True},
    "warning": {"color": "yellow", "bold": True},
    "error": {"color": "red", "bold": True},
    "critical": {"color": "red", "bold": True, "background": "white"},
}


class Logger(metaclass=SingletonMeta):
    """Process-wide colored logger for solver and CLI messages (stderr)."""

    def __init__(self, level: int = logging.INFO):
        if not hasattr(self, "_initialized"):
            self._logger = logging.getLogger(LOGGER_NAME)
            self._logger.handlers.clear()
            self._logger.propagate = False
            self._install(level)
            self._initialized = True

    def _install(self, level: int) -> None:
        coloredlogs.install(
            level=level,
            logger=self._logger,
            fmt=LOG_FORMAT,
            field_styles=FIELD_STYLES,
            level_styles=LEVEL_STYLES,
        )

    def set_level(self, level: int) -> None:
        """Change the threshold, e.g. from the CLI verbosity flag."""
        self._logger.setLevel(level)
        for handler in self._logger.handlers:
            handler.setLevel(level)

    def get_logger(self) -> logging.Logger:
        return self._logger

    def debug(self, message: str) -> None:
        self._logger.debug(message)

    def info(self, message: str) -> None:
        self._logger.info(message)

    def warning(self, message: str) -> None:
        self._logger.warning(message)

    def error(self, message: str) -> None:
        self._logger.error(message)


logger = Logger()
