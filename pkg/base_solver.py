"""
Base class for the configurable solvers (flow, removal, relaxation, pipeline, verification)
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional

from logger import get_logger
from settings import Settings, default_settings


class BaseSolver(ABC):
    """Settings plus a ``dipoles.<ClassName>`` logger"""

    def __init__(self, settings: Optional[Settings] = None, config_path: Optional[str] = None):
        if settings is None:
            settings = Settings(config_path=config_path) if config_path else default_settings()
        self.settings = settings
        self.logger = get_logger(self.__class__.__name__)
        self._attach_handlers()

    def _attach_handlers(self) -> None:
        """Apply the configured level and mirror records to ``logging.file`` when set"""
        section = self.settings.logging
        self.logger.setLevel(getattr(logging, section.level.upper(), logging.INFO))
        if not section.file:
            return

        target = Path(section.file).resolve()
        if any(getattr(h, "baseFilename", None) == str(target) for h in self.logger.handlers):
            return
        target.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(target)
        handler.setFormatter(logging.Formatter(section.format))
        self.logger.addHandler(handler)

    @property
    def tolerance(self) -> float:
        """Integrality tolerance in effect"""
        return self.settings.tolerances.integrality

    @abstractmethod
    def solve(self, *args, **kwargs) -> Any:
        """Run the solver"""

    def log_info(self, message: str) -> None:
        self.logger.info(message)

    def log_warning(self, message: str) -> None:
        self.logger.warning(message)

    def log_error(self, message: str, exception: Optional[BaseException] = None) -> None:
        """Error record; a traceback is attached when an exception is passed"""
        if exception is None:
            self.logger.error(message)
            return
        self.logger.error("%s: %s", message, exception, exc_info=exception)

    def log_debug(self, message: str) -> None:
        self.logger.debug(message)
