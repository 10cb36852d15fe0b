import logging
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s - %(message)s"

# Configure structured logging
logging.basicConfig(
    level=logging.INFO,
    format=LOG_FORMAT,
    handlers=[
        logging.StreamHandler()  # stderr, keeps stdout clean for CLI output
    ]
)

# Reusable logger
logger = logging.getLogger("dipoles")


def get_logger(name: str) -> logging.Logger:
    """Child logger of the project logger, e.g. ``dipoles.flow``"""
    return logger.getChild(name)


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Set the project log level and optionally mirror records to a file"""
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        if not any(isinstance(h, logging.FileHandler) and Path(h.baseFilename) == path.resolve()
                   for h in logger.handlers):
            handler = logging.FileHandler(path)
            handler.setFormatter(logging.Formatter(LOG_FORMAT))
            logger.addHandler(handler)
