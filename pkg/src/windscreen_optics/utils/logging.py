"""Logging configuration for the command line tool."""
import os
import sys
from enum import Enum
from typing import Optional

from loguru import logger


class LogLevel(str, Enum):
    """Log levels."""

    TRACE = "TRACE"
    DEBUG = "DEBUG"
    INFO = "INFO"
    SUCCESS = "SUCCESS"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LogConfig:
    """Logging configuration."""

    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "WARNING")
    LOG_DIR: str = os.getenv("LOG_DIR", "")
    LOG_ROTATION: str = os.getenv("LOG_ROTATION", "10 MB")
    LOG_RETENTION: str = os.getenv("LOG_RETENTION", "30 days")
    LOG_FORMAT: str = os.getenv(
        "LOG_FORMAT",
        "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
        "<level>{message}</level>",
    )


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure loguru sinks.

    Diagnostics go to stderr; a rotating file sink is added when LOG_DIR
    is set. Output files are never written through the logger.

    Args:
        level: Log level name, default LOG_LEVEL
    """
    level = LogLevel((level or LogConfig.LOG_LEVEL).upper()).value
    logger.remove()
    logger.add(
        sys.stderr,
        format=LogConfig.LOG_FORMAT,
        level=level,
        colorize=False,
        backtrace=False,
        diagnose=False,
    )

    if LogConfig.LOG_DIR:
        os.makedirs(LogConfig.LOG_DIR, exist_ok=True)
        logger.add(
            os.path.join(LogConfig.LOG_DIR, "windscreen_optics_{time}.log"),
            rotation=LogConfig.LOG_ROTATION,
            retention=LogConfig.LOG_RETENTION,
            format=LogConfig.LOG_FORMAT,
            level=level,
            compression="zip",
        )
    logger.debug(f"Log level: {level}")
