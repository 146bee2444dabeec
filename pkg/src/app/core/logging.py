"""
Logging setup for the app package
"""
import logging
import sys

from app.core.config import settings

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> logging.Logger:
    """Attach a single stderr handler to the `app` logger (idempotent)"""
    logger = logging.getLogger("app")
    logger.setLevel((level or settings.LOG_LEVEL).upper())
    if not any(getattr(h, "_curv4", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler._curv4 = True
        logger.addHandler(handler)
    return logger
